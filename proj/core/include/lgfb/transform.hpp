#pragma once

#include <span>

namespace lgfb {

/// Positions and speeds of the two free boundaries, g < h.
struct FrontState {
    double g = -1.0;
    double h = 1.0;
    double gdot = 0.0;
    double hdot = 0.0;

    [[nodiscard]] double span() const noexcept { return h - g; }
    bool operator==(const FrontState&) const = default;
};

/// Coefficients of the predator equation on the fixed interval [-1, 1]:
///   z_t = d rho z_yy + zeta(y) z_y + reaction,
/// with rho = 4/(h-g)^2 and zeta(y) = zeta0 + zeta1 y.
struct TransformCoeffs {
    double rho = 1.0;
    double zeta0 = 0.0;
    double zeta1 = 0.0;

    [[nodiscard]] double zeta(double y) const noexcept { return zeta0 + zeta1 * y; }
    /// max |zeta| over [-1, 1]; zeta is affine so it is attained at an end.
    [[nodiscard]] double max_abs_zeta() const noexcept;
};

TransformCoeffs coeffs(const FrontState& front);

/// x = ((h-g) y + h + g) / 2
double map_y_to_x(double y, const FrontState& front);
/// y = (2x - g - h) / (h - g)
double map_x_to_y(double x, const FrontState& front);

enum class Side { Left, Right };

/// z_y at y = -1 or y = +1 from the one-sided 3-point second-order stencil.
/// `z` holds samples on a uniform grid with spacing `dy`.
double boundary_gradient(std::span<const double> z, double dy, Side side);

struct FrontSpeeds {
    double gdot = 0.0;
    double hdot = 0.0;
};

/// Stefan law in computational coordinates:
///   g' = -beta 2/(h-g) z_y(-1),  h' = -beta 2/(h-g) z_y(1).
FrontSpeeds front_speeds(std::span<const double> z, double dy, const FrontState& front, double beta);

/// Constant C of the wrong-sign tolerance on computed speeds,
/// eps = C beta 2/(h-g) dy^2 max|z|.
inline constexpr double kStencilConstant = 4.0;

/// Largest wrong-signed front speed attributable to stencil truncation error
/// for a nonnegative field vanishing at both ends.
double stencil_tolerance(double max_abs_z, double dy, double span, double beta) noexcept;

}  // namespace lgfb
