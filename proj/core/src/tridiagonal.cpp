#include "lgfb/tridiagonal.hpp"

namespace lgfb {

void TridiagonalSolver::solve(std::span<const double> lower, std::span<const double> diag,
                              std::span<const double> upper, std::span<double> rhs) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    scratch_.resize(n);
    double denom = diag[0];
    scratch_[0] = n > 1 ? upper[0] / denom : 0.0;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - lower[i] * scratch_[i - 1];
        scratch_[i] = i + 1 < n ? upper[i] / denom : 0.0;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch_[i] * rhs[i + 1];
}

}  // namespace lgfb
