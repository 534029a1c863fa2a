#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace mehler {

/// Lacunary Fourier series f with coefficients 2^{-k/2} at n = +-2^k,
/// k = 1..K, under the shift group T_t f(x) = f(x - t).

/// ||f||^2 = 2 (1 - 2^{-K}).
double weierstrass_norm_sq(int order);

/// <f, b_t> with b_t = f - T_t f, summed as a cosine series.
double weierstrass_linear_part(int order, double t);

/// <f, b_t> = ||f||^2 - (2 pi)^{-1} int f(x - t) f(x) dx with f and its shift
/// sampled on 2^{K+2} points by an inverse real FFT.
class WeierstrassDirect {
public:
    explicit WeierstrassDirect(int order);
    ~WeierstrassDirect();
    WeierstrassDirect(const WeierstrassDirect&) = delete;
    WeierstrassDirect& operator=(const WeierstrassDirect&) = delete;

    double operator()(double t);

private:
    struct Plan;
    int order_;
    std::unique_ptr<Plan> plan_;
    std::vector<double> base_;
};

/// Coefficient residual of b_{r+t} = b_t + T_t b_r.
struct ScConstantCheck {
    double max_residual = 0.0;
    double max_modulus_defect = 0.0;  ///< max ||e^{-int}| - 1|
    std::size_t cases = 0;
};

/// Checks the identity for every (r, t) pair. Shifts should be dyadic
/// rationals so that n t is exact in floating point for n = 2^k.
ScConstantCheck sc_constant_check(const std::vector<double>& t_panel,
                                  const std::vector<double>& r_panel, int order);

/// Largest |g(t + h) - g(t)| / h over t on a grid of [0, 2 pi), per scale h.
struct QuotientScale {
    double h;
    double max_quotient;
};
std::vector<QuotientScale> difference_quotients(int order, const std::vector<double>& scales,
                                                std::size_t samples = 512);

}  // namespace mehler
