#pragma once

#include <span>
#include <vector>

namespace lgfb {

/// Thomas algorithm for a diagonally dominant tridiagonal system
///   lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored. Solves in place into `rhs`.
class TridiagonalSolver {
public:
    void solve(std::span<const double> lower, std::span<const double> diag, std::span<const double> upper,
               std::span<double> rhs);

private:
    std::vector<double> scratch_;
};

}  // namespace lgfb
