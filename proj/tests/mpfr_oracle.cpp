#include "mpfr_oracle.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>

namespace oracle {

namespace {
constexpr mpfr_prec_t kPrec = 256;
}

double norm_sf_log(double t) {
    mpfr_t x, r;
    mpfr_init2(x, kPrec);
    mpfr_init2(r, kPrec);
    // Phibar(t) = erfc(t/sqrt(2)) / 2
    mpfr_set_d(x, t, MPFR_RNDN);
    mpfr_sqrt_ui(r, 2, MPFR_RNDN);
    mpfr_div(x, x, r, MPFR_RNDN);
    mpfr_erfc(r, x, MPFR_RNDN);
    mpfr_div_ui(r, r, 2, MPFR_RNDN);
    mpfr_log(r, r, MPFR_RNDN);
    double out = mpfr_get_d(r, MPFR_RNDN);
    mpfr_clear(x);
    mpfr_clear(r);
    return out;
}

double gamma_upper_log_halfint(double shape, double x) {
    double two_a = shape * 2.0;
    if (!(shape > 0.0) || std::nearbyint(two_a) != two_a)
        throw std::invalid_argument("oracle: shape must be a positive multiple of 1/2");
    long steps;  // number of +1 recurrences
    mpfr_t q, term, xm, t0;
    mpfr_init2(q, kPrec);
    mpfr_init2(term, kPrec);
    mpfr_init2(xm, kPrec);
    mpfr_init2(t0, kPrec);
    mpfr_set_d(xm, x, MPFR_RNDN);
    double a0;
    if (std::nearbyint(shape) == shape) {
        // start at a = 1: Q = e^{-x}, first term = e^{-x}
        a0 = 1.0;
        mpfr_neg(q, xm, MPFR_RNDN);
        mpfr_exp(q, q, MPFR_RNDN);
        mpfr_set(term, q, MPFR_RNDN);  // x^0 e^{-x} / 0!
        steps = static_cast<long>(shape - 1.0);
    } else {
        // start at a = 1/2: Q = erfc(sqrt(x)), first term = x^{-1/2} e^{-x}/Gamma(1/2)
        a0 = 0.5;
        mpfr_sqrt(t0, xm, MPFR_RNDN);
        mpfr_erfc(q, t0, MPFR_RNDN);
        mpfr_neg(term, xm, MPFR_RNDN);
        mpfr_exp(term, term, MPFR_RNDN);
        mpfr_div(term, term, t0, MPFR_RNDN);  // x^{-1/2} e^{-x}
        mpfr_const_pi(t0, MPFR_RNDN);
        mpfr_sqrt(t0, t0, MPFR_RNDN);
        mpfr_div(term, term, t0, MPFR_RNDN);  // / sqrt(pi)
        steps = static_cast<long>(shape - 0.5);
    }
    // Q(a+1,x) = Q(a,x) + x^a e^{-x}/Gamma(a+1); term_{a+1} = term_a * x / a
    for (long j = 0; j < steps; ++j) {
        double a = a0 + static_cast<double>(j);
        mpfr_mul(term, term, xm, MPFR_RNDN);
        mpfr_div_d(term, term, a, MPFR_RNDN);
        mpfr_add(q, q, term, MPFR_RNDN);
    }
    mpfr_log(q, q, MPFR_RNDN);
    double out = mpfr_get_d(q, MPFR_RNDN);
    mpfr_clear(q);
    mpfr_clear(term);
    mpfr_clear(xm);
    mpfr_clear(t0);
    return out;
}

double gamma_upper_log(double shape, double x) {
    mpfr_t a, xx, r, lg;
    mpfr_init2(a, kPrec);
    mpfr_init2(xx, kPrec);
    mpfr_init2(r, kPrec);
    mpfr_init2(lg, kPrec);
    mpfr_set_d(a, shape, MPFR_RNDN);
    mpfr_set_d(xx, x, MPFR_RNDN);
    mpfr_gamma_inc(r, a, xx, MPFR_RNDN);  // upper, non-regularized
    mpfr_log(r, r, MPFR_RNDN);
    mpfr_lngamma(lg, a, MPFR_RNDN);
    mpfr_sub(r, r, lg, MPFR_RNDN);
    double out = mpfr_get_d(r, MPFR_RNDN);
    mpfr_clear(a);
    mpfr_clear(xx);
    mpfr_clear(r);
    mpfr_clear(lg);
    return out;
}

double psi(double t) {
    mpfr_t x, r, s;
    mpfr_init2(x, kPrec);
    mpfr_init2(r, kPrec);
    mpfr_init2(s, kPrec);
    mpfr_set_d(x, t, MPFR_RNDN);
    mpfr_log1p(r, x, MPFR_RNDN);   // ln(1+t)
    mpfr_sqr(s, x, MPFR_RNDN);
    mpfr_div_ui(s, s, 2, MPFR_RNDN);
    mpfr_add(r, r, s, MPFR_RNDN);  // ln(1+t) + t^2/2
    mpfr_sub(r, x, r, MPFR_RNDN);  // t - ...
    double out = mpfr_get_d(r, MPFR_RNDN);
    mpfr_clear(x);
    mpfr_clear(r);
    mpfr_clear(s);
    return out;
}

}  // namespace oracle
