#include <hankelmc/random.hpp>

#include <cmath>

#include <hankelmc/errors.hpp>

namespace hankelmc
{

double Rng::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open()
{
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

std::uint64_t Rng::uniform_index(std::uint64_t n)
{
    if (n == 0) {
        throw ValidationError("uniform_index: empty range");
    }
    // Reject the top partial bucket.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double Rng::normal()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_  = v * f;
    has_spare_     = true;
    return u * f;
}

Complex Rng::complex_normal()
{
    const double re = normal();
    const double im = normal();
    return Complex(re, im) * M_SQRT1_2;
}

double Rng::gamma(double shape, double scale)
{
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw DomainError("gamma: shape and scale must be positive");
    }
    if (shape < 1.0) {
        // G(a) = G(a + 1) * U^(1/a); computed in log space so tiny shapes
        // keep their dynamic range.
        const double g = gamma(shape + 1.0, 1.0);
        const double log_u = std::log(uniform_open());
        return scale * std::exp(std::log(g) + log_u / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_open();
        if (u < 1.0 - 0.0331 * (x * x) * (x * x)) {
            return scale * d * v;
        }
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
            return scale * d * v;
        }
    }
}

} // namespace hankelmc
