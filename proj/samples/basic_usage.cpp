// Trace the B = 0 loop around the pentagram, report its phase and a few Fourier terms.

#include <pentagon/pentagon.hpp>

#include <cstdio>

int main() {
    using namespace pentagon;

    const AlphaPoint star = positive_pentagram();
    std::printf("pentagram: I = %.6f, B = %.6f\n", inertia(star), magnetic_B(star));

    const ParametrizedLoop loop = pentagram_loop();
    const PhaseReport rep = geometric_phase(loop);
    std::printf("loop: tau = %.6f, omega = %.4f, delta_theta = %.5f rad (%.2f deg)\n", loop.tau(), loop.omega(),
                rep.delta_theta, rep.delta_theta * 180.0 / pi);

    const FourierSeries f = fourier_cosine_psi5(loop, 6);
    for (int n = 0; n <= 6; ++n) std::printf("  a~%d = % .5f\n", n, f.cos_coeffs[static_cast<std::size_t>(n)]);

    const Trajectory tr = reconstruct_motion(loop, 0.0);
    std::printf("orientation after one period: %.5f rad\n", tr.theta.back());
    return rep.delta_theta > 0.0 ? 0 : 1;
}
