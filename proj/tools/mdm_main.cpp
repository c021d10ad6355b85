// Command-line front end for the crossbar wire-drop toolkit: quantization,
// row remapping, analytic prediction, mesh simulation, and the batch
// experiments. Every command reads/writes plain JSON or CSV; failures print a
// machine-readable JSON object to stderr and exit nonzero.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdm/analytic.hpp"
#include "mdm/bitslice.hpp"
#include "mdm/circuit.hpp"
#include "mdm/experiments.hpp"
#include "mdm/parallel.hpp"
#include "mdm/rng.hpp"
#include "mdm/serialize.hpp"

namespace {

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

mdm::TileWithScale load_tile(const std::string& path) {
    return mdm::tile_from_json(read_file(path));
}

void emit_error(const std::string& type, const std::string& message) {
    nlohmann::ordered_json j{{"error", type}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

mdm::WeightDistribution make_distribution(const std::string& name, double param) {
    if (name == "exponential") return mdm::WeightDistribution::exponential(param);
    if (name == "half_normal") return mdm::WeightDistribution::half_normal(param);
    throw std::invalid_argument("unknown distribution '" + name +
                                "' (expected exponential or half_normal)");
}

struct Options {
    mdm::ResistanceParams params;
    int threads = 1;
    std::uint64_t seed = 1;
    std::string in_path, out_path, plan_path, netlist_path, scatter_path;
    std::string dataflow = "conventional";
    std::string dist_name = "half_normal";
    double dist_param = 0.05;
    int bits = 8;
    int first_exponent = 1;
    int rows = 64, cols = 64;
    int weights_per_row = 8;
    int n_tiles = 0;
    double sparsity = 0.8;
    double tol = 1e-10;
    double eta = 1e-3;
    std::uint64_t n_samples = 1000000;
    int trials = 30;
};

void add_param_options(CLI::App* cmd, mdm::ResistanceParams& p) {
    cmd->add_option("--wire-r", p.wire_r, "wire resistance per segment (ohm)")
        ->capture_default_str();
    cmd->add_option("--r-on", p.r_on, "device on-resistance (ohm)")->capture_default_str();
    cmd->add_option("--r-off", p.r_off, "device off-resistance (ohm)")->capture_default_str();
    cmd->add_option("--v-in", p.v_in, "row drive voltage (V)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bit-sliced memristive crossbar simulator and row remapper"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--threads", o.threads, "worker threads for batch experiments")
        ->envname("MDM_THREADS")
        ->capture_default_str();

    // quantize: weight CSV -> bit-sliced tile
    auto* quantize = app.add_subcommand("quantize", "bit-slice a weight matrix into a tile");
    quantize->add_option("--weights", o.in_path, "input weight CSV")->required();
    quantize->add_option("--bits", o.bits, "bits per weight")->capture_default_str();
    quantize
        ->add_option("--first-exponent", o.first_exponent,
                     "exponent of the most significant bit (bit value 2^-e)")
        ->capture_default_str();
    quantize->add_option("--dataflow", o.dataflow, "conventional or reversed")
        ->capture_default_str();
    quantize->add_option("--out", o.out_path, "output tile JSON (default stdout)");
    quantize->callback([&] {
        std::istringstream in(read_file(o.in_path));
        const mdm::WeightMatrix w = mdm::read_weights_csv(in);
        const auto sigs = mdm::contiguous_significances(o.first_exponent, o.bits);
        const mdm::QuantizeResult q =
            mdm::quantize(w, sigs, mdm::dataflow_from_string(o.dataflow));
        write_output(o.out_path, mdm::tile_to_json(q.tile, q.scale));
    });

    // dequantize: tile -> weight CSV
    auto* dequantize = app.add_subcommand("dequantize", "reassemble weights from a tile");
    dequantize->add_option("--tile", o.in_path, "input tile JSON")->required();
    dequantize->add_option("--out", o.out_path, "output weight CSV (default stdout)");
    dequantize->callback([&] {
        const mdm::TileWithScale t = load_tile(o.in_path);
        std::ostringstream out;
        mdm::write_weights_csv(out, mdm::dequantize(t.tile, t.scale.value_or(1.0)));
        write_output(o.out_path, out.str());
    });

    // map: tile -> remapping plan + mapped tile
    auto* map = app.add_subcommand("map", "compute the wire-drop-minimizing row remap");
    map->add_option("--tile", o.in_path, "input tile JSON")->required();
    map->add_option("--plan-out", o.plan_path, "output plan JSON");
    map->add_option("--out", o.out_path, "output mapped tile JSON");
    map->callback([&] {
        const mdm::TileWithScale t = load_tile(o.in_path);
        const mdm::MdmResult r = mdm::mdm_map(t.tile);
        if (!o.plan_path.empty()) write_output(o.plan_path, mdm::plan_to_json(r.plan));
        if (!o.out_path.empty()) write_output(o.out_path, mdm::tile_to_json(r.tile, t.scale));
        if (o.plan_path.empty() && o.out_path.empty())
            write_output("", mdm::plan_to_json(r.plan));
    });

    // nf: analytic prediction only
    auto* nf = app.add_subcommand("nf", "predict the wire-drop figure analytically");
    nf->add_option("--tile", o.in_path, "input tile JSON")->required();
    add_param_options(nf, o.params);
    nf->add_option("--out", o.out_path, "output report JSON (default stdout)");
    nf->callback([&] {
        const mdm::TileWithScale t = load_tile(o.in_path);
        const mdm::NfPrediction p = mdm::analytic_nf(t.tile, o.params);
        write_output(o.out_path, mdm::nf_report_to_json(t.tile, o.params, p));
    });

    // simulate: mesh solve, measured + predicted, optional netlist export
    auto* simulate = app.add_subcommand("simulate", "solve the resistive mesh and measure");
    simulate->add_option("--tile", o.in_path, "input tile JSON")->required();
    add_param_options(simulate, o.params);
    simulate->add_option("--tol", o.tol, "solver relative tolerance")->capture_default_str();
    simulate->add_option("--netlist", o.netlist_path, "also export a SPICE netlist here");
    simulate->add_option("--out", o.out_path, "output report JSON (default stdout)");
    simulate->callback([&] {
        const mdm::TileWithScale t = load_tile(o.in_path);
        const mdm::NfPrediction p = mdm::analytic_nf(t.tile, o.params);
        const mdm::NfMeasurement m = mdm::measured_nf(t.tile, o.params, o.tol);
        if (!o.netlist_path.empty()) {
            std::ostringstream net;
            mdm::write_netlist(net, t.tile, o.params);
            write_output(o.netlist_path, net.str());
        }
        write_output(o.out_path, mdm::nf_report_to_json(t.tile, o.params, p, &m));
    });

    // sparsity: column-density bound check on sampled weights
    auto* sparsity = app.add_subcommand("sparsity", "check the near-half-density bound");
    sparsity->add_option("--dist", o.dist_name, "exponential or half_normal")
        ->capture_default_str();
    sparsity->add_option("--param", o.dist_param, "rate (exponential) or sigma (half_normal)")
        ->capture_default_str();
    sparsity->add_option("--n", o.n_samples, "sample count")->capture_default_str();
    sparsity->add_option("--bits", o.bits, "bit depth")->capture_default_str();
    sparsity->add_option("--seed", o.seed, "random seed")->capture_default_str();
    sparsity->add_option("--out", o.out_path, "output report JSON (default stdout)");
    sparsity->callback([&] {
        const auto dist = make_distribution(o.dist_name, o.dist_param);
        const mdm::SparsityReport r =
            mdm::verify_sparsity_bound(dist, o.n_samples, o.bits, o.seed);
        write_output(o.out_path, mdm::sparsity_report_to_json(r));
    });

    // fit: measured-vs-predicted least squares over random tiles
    auto* fit = app.add_subcommand("fit", "fit measured against predicted over random tiles");
    fit->add_option("--tiles", o.n_tiles, "number of tiles")->default_val(500);
    fit->add_option("--rows", o.rows, "tile rows")->capture_default_str();
    fit->add_option("--cols", o.cols, "tile cols")->capture_default_str();
    fit->add_option("--sparsity", o.sparsity, "fraction of inactive cells")
        ->capture_default_str();
    fit->add_option("--seed", o.seed, "random seed")->capture_default_str();
    add_param_options(fit, o.params);
    fit->add_option("--scatter", o.scatter_path, "also write predicted/measured pairs CSV");
    fit->add_option("--out", o.out_path, "output report JSON (default stdout)");
    fit->callback([&] {
        std::vector<std::array<double, 2>> pts;
        const mdm::FitReport r =
            mdm::hypothesis_fit(o.n_tiles, o.rows, o.cols, o.sparsity, o.params, o.seed,
                                o.scatter_path.empty() ? nullptr : &pts,
                                mdm::resolve_threads(o.threads));
        if (!o.scatter_path.empty()) {
            std::ostringstream s;
            mdm::write_scatter_csv(s, pts);
            write_output(o.scatter_path, s.str());
        }
        write_output(o.out_path, mdm::fit_report_to_json(r));
    });

    // benchmark: mapping configurations over generated tiles
    auto* benchmark = app.add_subcommand("benchmark", "compare mapping configurations");
    benchmark->add_option("--tiles", o.n_tiles, "number of tiles")->default_val(100);
    benchmark->add_option("--rows", o.rows, "tile rows")->capture_default_str();
    benchmark->add_option("--cols", o.cols, "tile cols")->capture_default_str();
    benchmark->add_option("--bits", o.bits, "bits per weight")->capture_default_str();
    benchmark->add_option("--dist", o.dist_name, "weight distribution")->capture_default_str();
    benchmark->add_option("--param", o.dist_param, "distribution parameter")
        ->capture_default_str();
    benchmark->add_option("--seed", o.seed, "random seed")->capture_default_str();
    add_param_options(benchmark, o.params);
    benchmark->add_option("--out", o.out_path, "output CSV (default stdout)");
    benchmark->callback([&] {
        const auto dist = make_distribution(o.dist_name, o.dist_param);
        std::vector<mdm::BitTile> tiles;
        tiles.reserve(o.n_tiles);
        for (int t = 0; t < o.n_tiles; ++t)
            tiles.push_back(mdm::gen_dnn_like_tile(dist, o.rows, o.cols,
                                                   mdm::rng::derive_stream(o.seed, t), o.bits));
        const auto rows =
            mdm::nf_benchmark(tiles, o.params, mdm::resolve_threads(o.threads));
        std::ostringstream out;
        mdm::write_benchmark_csv(out, rows);
        write_output(o.out_path, out.str());
    });

    // calibrate: per-distance degradation coefficient from mesh measurements
    auto* calibrate = app.add_subcommand("calibrate", "fit the per-distance loss coefficient");
    calibrate->add_option("--tiles", o.n_tiles, "number of tiles")->default_val(12);
    calibrate->add_option("--rows", o.rows, "tile rows")->default_val(128);
    calibrate->add_option("--cols", o.cols, "tile cols")->default_val(128);
    calibrate->add_option("--sparsity", o.sparsity, "fraction of inactive cells")
        ->capture_default_str();
    calibrate->add_option("--seed", o.seed, "random seed")->capture_default_str();
    add_param_options(calibrate, o.params);
    calibrate->add_option("--out", o.out_path, "output JSON (default stdout)");
    calibrate->callback([&] {
        std::vector<mdm::BitTile> tiles;
        tiles.reserve(o.n_tiles);
        for (int t = 0; t < o.n_tiles; ++t)
            tiles.push_back(mdm::gen_random_tile(o.rows, o.cols, o.sparsity,
                                                 mdm::rng::derive_stream(o.seed, t)));
        const double eta =
            mdm::calibrate_eta(tiles, o.params, mdm::resolve_threads(o.threads));
        nlohmann::ordered_json j{{"eta", eta},
                                 {"n_tiles", o.n_tiles},
                                 {"rows", o.rows},
                                 {"cols", o.cols},
                                 {"sparsity", o.sparsity}};
        write_output(o.out_path, j.dump(2) + "\n");
    });

    // accuracy: noisy-vs-clean output error, identity vs remapped
    auto* accuracy = app.add_subcommand("accuracy", "output-error proxy for a noisy tile");
    accuracy->add_option("--rows", o.rows, "weight matrix rows")->capture_default_str();
    accuracy->add_option("--weights-per-row", o.weights_per_row, "weight matrix cols")
        ->capture_default_str();
    accuracy->add_option("--bits", o.bits, "bits per weight")->capture_default_str();
    accuracy->add_option("--dist", o.dist_name, "weight distribution")->capture_default_str();
    accuracy->add_option("--param", o.dist_param, "distribution parameter")
        ->capture_default_str();
    accuracy->add_option("--eta", o.eta, "per-distance loss coefficient")
        ->capture_default_str();
    accuracy->add_option("--trials", o.trials, "input vectors to sample")
        ->capture_default_str();
    accuracy->add_option("--seed", o.seed, "random seed")->capture_default_str();
    accuracy->add_option("--out", o.out_path, "output CSV (default stdout)");
    accuracy->callback([&] {
        const auto dist = make_distribution(o.dist_name, o.dist_param);
        const mdm::WeightMatrix w = mdm::sample_weight_matrix(
            dist, o.rows, o.weights_per_row, mdm::rng::derive_stream(o.seed, 0));
        const mdm::NoiseModel model{o.eta, mdm::NoiseModel::Weighting::Distance};
        const mdm::AccuracyResult r = mdm::accuracy_proxy(
            w, model, o.trials, mdm::rng::derive_stream(o.seed, 1), o.bits);
        std::ostringstream out;
        mdm::write_accuracy_csv(out, o.eta, r);
        write_output(o.out_path, out.str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        emit_error("usage", e.what());
        return e.get_exit_code() == 0 ? 1 : e.get_exit_code();
    } catch (const mdm::ParseError& e) {
        emit_error("parse", e.what());
        return 1;
    } catch (const mdm::SolverError& e) {
        emit_error("solver", e.what());
        return 1;
    } catch (const std::invalid_argument& e) {
        emit_error("invalid_argument", e.what());
        return 1;
    } catch (const std::exception& e) {
        emit_error("io", e.what());
        return 1;
    }
    return 0;
}
