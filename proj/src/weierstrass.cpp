#include "mehler/weierstrass.hpp"

#include "mehler/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

namespace mehler {

namespace {

void require_order(int order) {
    if (order < 1 || order > 26)
        throw DomainError("Weierstrass order must lie in [1, 26]");
}

}  // namespace

double weierstrass_norm_sq(int order) {
    require_order(order);
    return 2.0 * (1.0 - std::ldexp(1.0, -order));
}

double weierstrass_linear_part(int order, double t) {
    require_order(order);
    double series = 0.0;
    for (int k = 1; k <= order; ++k)
        series += std::ldexp(1.0, -k) * std::cos(std::ldexp(t, k));
    return weierstrass_norm_sq(order) - 2.0 * series;
}

struct WeierstrassDirect::Plan {
    std::size_t size;
    fftw_complex* spectrum;
    double* samples;
    fftw_plan plan;

    explicit Plan(std::size_t n)
        : size(n),
          spectrum(fftw_alloc_complex(n / 2 + 1)),
          samples(fftw_alloc_real(n)),
          plan(fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum, samples, FFTW_ESTIMATE)) {
        if (!spectrum || !samples || !plan)
            throw std::bad_alloc();
    }
    ~Plan() {
        fftw_destroy_plan(plan);
        fftw_free(spectrum);
        fftw_free(samples);
    }
    Plan(const Plan&) = delete;
    Plan& operator=(const Plan&) = delete;

    // Samples of sum_k 2^{-k/2} 2 cos(2^k (x - t)) at x_j = 2 pi j / size.
    const double* synthesize(int order, double t) {
        for (std::size_t n = 0; n <= size / 2; ++n)
            spectrum[n][0] = spectrum[n][1] = 0.0;
        for (int k = 1; k <= order; ++k) {
            const auto n = std::size_t{1} << k;
            const double a = std::ldexp(t, k);
            const double c = std::ldexp(1.0, -k);
            // c2r supplies the conjugate bin -n itself
            spectrum[n][0] = std::sqrt(c) * std::cos(a);
            spectrum[n][1] = -std::sqrt(c) * std::sin(a);
        }
        fftw_execute(plan);
        return samples;
    }
};

WeierstrassDirect::WeierstrassDirect(int order) : order_(order) {
    require_order(order);
    plan_ = std::make_unique<Plan>(std::size_t{1} << (order + 2));
    const double* f = plan_->synthesize(order_, 0.0);
    base_.assign(f, f + plan_->size);
}

WeierstrassDirect::~WeierstrassDirect() = default;

double WeierstrassDirect::operator()(double t) {
    const double* shifted = plan_->synthesize(order_, t);
    // compensated sum of the product mean
    double sum = 0.0, carry = 0.0;
    for (std::size_t j = 0; j < base_.size(); ++j) {
        const double y = shifted[j] * base_[j] - carry;
        const double s = sum + y;
        carry = (s - sum) - y;
        sum = s;
    }
    return weierstrass_norm_sq(order_) - sum / static_cast<double>(base_.size());
}

ScConstantCheck sc_constant_check(const std::vector<double>& t_panel,
                                  const std::vector<double>& r_panel, int order) {
    require_order(order);
    using cplx = std::complex<double>;
    const auto shift = [](double n, double t) { return std::polar(1.0, -n * t); };
    ScConstantCheck out;
    for (const double t : t_panel) {
        for (const double r : r_panel) {
            for (int k = 1; k <= order; ++k) {
                for (const double n : {std::ldexp(1.0, k), -std::ldexp(1.0, k)}) {
                    const double fhat = std::sqrt(std::ldexp(1.0, -k));
                    const cplx et = shift(n, t);
                    const cplx b_rt = (1.0 - shift(n, r + t)) * fhat;
                    const cplx b_t = (1.0 - et) * fhat;
                    const cplx b_r = (1.0 - shift(n, r)) * fhat;
                    out.max_residual = std::max(out.max_residual, std::abs(b_rt - b_t - et * b_r));
                    out.max_modulus_defect =
                        std::max(out.max_modulus_defect, std::abs(std::abs(et) - 1.0));
                }
            }
            ++out.cases;
        }
    }
    return out;
}

std::vector<QuotientScale> difference_quotients(int order, const std::vector<double>& scales,
                                                std::size_t samples) {
    std::vector<QuotientScale> out;
    for (const double h : scales) {
        if (!(h > 0.0))
            throw DomainError("difference_quotients: scales must be positive");
        double worst = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / samples;
            worst = std::max(worst, std::abs(weierstrass_linear_part(order, t + h) -
                                             weierstrass_linear_part(order, t)) / h);
        }
        out.push_back({h, worst});
    }
    return out;
}

}  // namespace mehler
