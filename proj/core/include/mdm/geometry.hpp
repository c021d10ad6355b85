#ifndef MDM_GEOMETRY_HPP
#define MDM_GEOMETRY_HPP

#include <stdexcept>
#include <string>

namespace mdm {

// Orientation of the row drive relative to the stored column order.
// Conventional feeds rows from the side of column 0 (highest significance
// first); Reversed feeds from the opposite side, so stored column c sits at
// physical distance cols-1-c from the input rail.
enum class Dataflow { Conventional, Reversed };

inline const char* to_string(Dataflow d) {
    return d == Dataflow::Conventional ? "conventional" : "reversed";
}

Dataflow dataflow_from_string(const std::string& s);

// Crossbar tile dimensions plus dataflow orientation.
//
// Index convention: a crosspoint (j, k) has j column-wire segments between it
// and the output-rail terminal and k row-wire segments between it and the
// input-rail terminal. The crosspoint adjacent to a rail terminal is at
// distance 0 (the terminal contacts it directly, no wire segment).
struct CrossbarGeometry {
    int rows = 1;   // J
    int cols = 1;   // K
    Dataflow dataflow = Dataflow::Conventional;

    void validate() const {
        if (rows < 1 || cols < 1)
            throw std::invalid_argument("crossbar geometry requires rows >= 1 and cols >= 1");
    }

    // Physical distance from the input rail for stored (logical) column c.
    int physical_col(int c) const {
        return dataflow == Dataflow::Conventional ? c : cols - 1 - c;
    }

    bool operator==(const CrossbarGeometry&) const = default;
};

// Manhattan distance of crosspoint (j, k) from the I/O rails: j + physical k.
// k is a logical column index; the dataflow orientation is applied.
inline int manhattan_distance(const CrossbarGeometry& g, int j, int k) {
    if (j < 0 || j >= g.rows || k < 0 || k >= g.cols)
        throw std::out_of_range("crosspoint index (" + std::to_string(j) + "," +
                                std::to_string(k) + ") outside " + std::to_string(g.rows) +
                                "x" + std::to_string(g.cols) + " tile");
    return j + g.physical_col(k);
}

}  // namespace mdm

#endif
