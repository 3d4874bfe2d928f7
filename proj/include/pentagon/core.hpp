#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pentagon {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 operator-(const Vec3& a) { return {-a[0], -a[1], -a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Wraps an angle to the principal interval (-pi, pi]; an exact -pi maps to pi.
inline double wrap_angle(double x) {
    double r = std::remainder(x, two_pi);
    if (r <= -pi) r += two_pi;
    return r;
}

enum class ErrorCode {
    InvalidInput,
    DegenerateEdge,
    NotClosed,
    Inconsistent,
    DomainError,
    ConvergenceFailure,
    NoCrossing,
    NoClosure,
    DriftExceeded,
    ChartExit,
    ChartError,
    OpenLoop,
    PhaseConventionError,
    IoError,
};

inline const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::DegenerateEdge: return "DegenerateEdge";
        case ErrorCode::NotClosed: return "NotClosed";
        case ErrorCode::Inconsistent: return "Inconsistent";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
        case ErrorCode::NoCrossing: return "NoCrossing";
        case ErrorCode::NoClosure: return "NoClosure";
        case ErrorCode::DriftExceeded: return "DriftExceeded";
        case ErrorCode::ChartExit: return "ChartExit";
        case ErrorCode::ChartError: return "ChartError";
        case ErrorCode::OpenLoop: return "OpenLoop";
        case ErrorCode::PhaseConventionError: return "PhaseConventionError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

/// Library exception; the code distinguishes bad input from numerical failure.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// True for errors caused by the caller's data rather than by a numerical process.
    bool is_input_error() const noexcept {
        switch (code_) {
            case ErrorCode::InvalidInput:
            case ErrorCode::DegenerateEdge:
            case ErrorCode::NotClosed:
            case ErrorCode::Inconsistent:
            case ErrorCode::DomainError:
            case ErrorCode::ChartError:
                return true;
            default:
                return false;
        }
    }

private:
    ErrorCode code_;
};

namespace tol {
inline constexpr double closure = 1e-10;      // constraint / closure residual for validation
inline constexpr double singular_zeta = 1e-9; // |zeta| below this leaves psi4 undetermined
inline constexpr double acos_clamp = 1e-12;   // arccos arguments this far outside [-1,1] are clamped
inline constexpr double tangency = 1e-9;      // ||zeta| - 2| below this is a single psi4
inline constexpr double degenerate_edge = 1e-12;
inline constexpr double shape_equal = 1e-9;
inline constexpr double boundary = 1e-9;
}  // namespace tol

/// arccos that tolerates roundoff just outside [-1, 1].
inline double safe_acos(double x) {
    if (x > 1.0 && x <= 1.0 + tol::acos_clamp) x = 1.0;
    if (x < -1.0 && x >= -1.0 - tol::acos_clamp) x = -1.0;
    return std::acos(x);
}

}  // namespace pentagon
