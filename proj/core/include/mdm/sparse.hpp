#ifndef MDM_SPARSE_HPP
#define MDM_SPARSE_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdm {

// Compressed sparse row matrix, square, assembled from triplets.
struct CsrMatrix {
    int n = 0;
    std::vector<int> row_ptr;   // n+1
    std::vector<int> col_idx;
    std::vector<double> values;

    std::size_t nnz() const { return values.size(); }

    // y = A x
    void multiply(const double* x, double* y) const;
};

// Accumulating triplet builder; duplicate (row, col) entries are summed.
class CsrBuilder {
  public:
    explicit CsrBuilder(int n) : n_(n), diag_(n, 0.0), off_(n) {}

    void add(int row, int col, double v);
    CsrMatrix build() const;

  private:
    int n_;
    std::vector<double> diag_;
    std::vector<std::vector<std::pair<int, double>>> off_;
};

struct SolverError : std::runtime_error {
    SolverError(const std::string& what, double residual_, int iterations_)
        : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
    double residual = 0.0;
    int iterations = 0;
};

struct CgResult {
    std::vector<double> x;
    double residual = 0.0;   // final relative residual |b - Ax| / |b|
    int iterations = 0;
};

// Jacobi-preconditioned conjugate gradients for symmetric positive definite
// systems. Converges to |b - Ax| <= tol * |b| (checked against the explicitly
// recomputed residual, not just the recurrence); throws SolverError if the cap
// (default 50*sqrt(n) iterations) is exhausted first or the iteration
// stagnates above tol.
CgResult pcg_solve(const CsrMatrix& a, const std::vector<double>& b, double tol,
                   int max_iterations = -1);

// Dense LDL^T factorization and solve, the high-accuracy direct route for
// small systems. O(n^2) memory and O(n^3) time, so callers should gate it on
// system size. Throws SolverError on a non-positive pivot.
std::vector<double> ldlt_solve(const CsrMatrix& a, const std::vector<double>& b);

}  // namespace mdm

#endif
