#include "lgfb/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lgfb/error.hpp"

namespace lgfb {

namespace {

double checked_span(const FrontState& front) {
    const double span = front.h - front.g;
    if (!(span > 0.0)) {
        throw Error(ErrorCode::DegenerateInterval,
                    "h - g must be > 0 (g=" + std::to_string(front.g) + ", h=" + std::to_string(front.h) + ")");
    }
    return span;
}

}  // namespace

double TransformCoeffs::max_abs_zeta() const noexcept {
    return std::max(std::abs(zeta0 - zeta1), std::abs(zeta0 + zeta1));
}

TransformCoeffs coeffs(const FrontState& front) {
    const double span = checked_span(front);
    return {4.0 / (span * span), (front.hdot + front.gdot) / span, (front.hdot - front.gdot) / span};
}

double map_y_to_x(double y, const FrontState& front) {
    const double span = checked_span(front);
    return 0.5 * (span * y + front.h + front.g);
}

double map_x_to_y(double x, const FrontState& front) {
    const double span = checked_span(front);
    return (2.0 * x - front.g - front.h) / span;
}

double boundary_gradient(std::span<const double> z, double dy, Side side) {
    if (z.size() < 3) throw Error(ErrorCode::GridTooSmall, "boundary stencil needs at least 3 nodes");
    const std::size_t n = z.size() - 1;
    if (side == Side::Left) return (-3.0 * z[0] + 4.0 * z[1] - z[2]) / (2.0 * dy);
    return (3.0 * z[n] - 4.0 * z[n - 1] + z[n - 2]) / (2.0 * dy);
}

FrontSpeeds front_speeds(std::span<const double> z, double dy, const FrontState& front, double beta) {
    const double scale = -beta * 2.0 / checked_span(front);
    return {scale * boundary_gradient(z, dy, Side::Left), scale * boundary_gradient(z, dy, Side::Right)};
}

double stencil_tolerance(double max_abs_z, double dy, double span, double beta) noexcept {
    return kStencilConstant * beta * (2.0 / span) * dy * dy * max_abs_z;
}

}  // namespace lgfb
