#ifndef MDM_SERIALIZE_HPP
#define MDM_SERIALIZE_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mdm/bitslice.hpp"
#include "mdm/circuit.hpp"
#include "mdm/experiments.hpp"
#include "mdm/tile.hpp"

namespace mdm {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tile JSON: {"rows", "cols", "dataflow", "significances", "active": [[j,k],...]}
// with an optional "scale" carried for quantized tiles. Active cells are
// listed row-major over logical coordinates. Doubles round-trip exactly
// (shortest-representation formatting).
std::string tile_to_json(const BitTile& tile, std::optional<double> scale = std::nullopt);
struct TileWithScale {
    BitTile tile;
    std::optional<double> scale;
};
TileWithScale tile_from_json(const std::string& text);

// Plan JSON: {"row_perm": [...], "dataflow": "conventional"|"reversed"}
std::string plan_to_json(const MdmPlan& plan);
MdmPlan plan_from_json(const std::string& text);

// Report JSON: {"geometry", "params", "predicted": {"nf_sum", "nf_normalized"},
// "measured": {"aggregate", "per_column", "excluded_columns"}}; "measured" is
// present only when a measurement is supplied.
std::string nf_report_to_json(const BitTile& tile, const ResistanceParams& params,
                              const NfPrediction& predicted,
                              const NfMeasurement* measured = nullptr);

std::string sparsity_report_to_json(const SparsityReport& report);
std::string fit_report_to_json(const FitReport& report);

// Weight CSV: one matrix row per line, comma-separated, shortest
// round-trip double formatting. Ragged rows or non-numeric fields throw
// ParseError.
void write_weights_csv(std::ostream& out, const WeightMatrix& w);
WeightMatrix read_weights_csv(std::istream& in);

// benchmark.csv: header config,mean_nf,reduction_pct
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);
// accuracy.csv: header eta,baseline_err,mdm_err
void write_accuracy_csv(std::ostream& out, double eta, const AccuracyResult& result);
// scatter.csv: header predicted_nf,measured_nf
void write_scatter_csv(std::ostream& out, const std::vector<std::array<double, 2>>& points);

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace mdm

#endif
