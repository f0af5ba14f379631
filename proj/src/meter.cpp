#include "potmeter/meter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "potmeter/errors.hpp"
#include "potmeter/fft.hpp"
#include "potmeter/weak_value.hpp"

namespace potmeter {

namespace {

double trapezoid_weight(int j, int n, double dq) {
    return (j == 0 || j == n - 1) ? 0.5 * dq : dq;
}

}  // namespace

PointerState conditional_pointer_state(const WaveFunction& psi, int site, const MeterSettings& s,
                                       const PhysicalConstants& consts) {
    if (s.sigma_q <= 0.0) throw DegenerateWidth("pointer width must be positive");
    if (s.pointer_n < 8) throw Error("pointer grid needs at least 8 points");
    if (site < 0 || static_cast<std::size_t>(site) >= psi.grid.n)
        throw Error("probe site index out of range");

    const std::vector<cplx> modes = momentum_amplitudes(psi);  // ring-only by construction
    const std::vector<double> kvals = momentum_modes(psi.grid);
    const double L = psi.grid.length();
    const double x = psi.grid.x(site);

    double max_power = 0.0;
    for (const cplx& m : modes) max_power = std::max(max_power, std::norm(m));
    if (max_power == 0.0) throw AllMasked("state has no momentum content");

    std::vector<int> retained;
    double max_k = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        if (std::norm(modes[m]) >= s.mode_cutoff * max_power) {
            retained.push_back(static_cast<int>(m));
            max_k = std::max(max_k, std::abs(kvals[m]));
        }
    }

    PointerState st;
    st.max_mode_k = max_k;
    const double max_shift = std::abs(s.g) * consts.hbar * max_k;
    const double min_halfwidth = max_shift + 5.0 * s.sigma_q;
    double halfwidth = s.pointer_halfwidth;
    if (halfwidth <= 0.0) {
        halfwidth = max_shift + 7.0 * s.sigma_q;  // keeps boundary mass far below the check
    } else if (halfwidth < min_halfwidth) {
        throw PointerGridTooNarrow("pointer grid halfwidth " + std::to_string(halfwidth) +
                                   " is below the coupling shift plus five pointer widths (" +
                                   std::to_string(min_halfwidth) + ")");
    }
    st.qgrid.n = s.pointer_n;
    st.qgrid.halfwidth = halfwidth;
    st.qgrid.dq = 2.0 * halfwidth / (s.pointer_n - 1);

    if (max_shift > 0.1 * s.sigma_q) {
        st.warnings.push_back(
            "coupling is not weak: the largest pointer shift g*hbar*k_max = " +
            std::to_string(max_shift) + " exceeds 0.1 * sigma_q; estimator bias grows as g^2");
    }

    // phi(Q) = sum_k  u_k(x) psi_k  Phi0(Q - g hbar k),
    // Phi0(Q) = (2 pi sigma^2)^{-1/4} exp(-Q^2/(4 sigma^2) + i k_pointer Q).
    const double sig2 = s.sigma_q * s.sigma_q;
    const double norm_factor = std::pow(2.0 * M_PI * sig2, -0.25);
    st.phi.assign(st.qgrid.n, cplx(0.0, 0.0));
    const double inv_root_L = 1.0 / std::sqrt(L);
    for (int m : retained) {
        const cplx coeff = modes[m] * inv_root_L *
                           std::exp(cplx(0.0, kvals[m] * x));
        const double center = s.g * consts.hbar * kvals[m];
        for (int j = 0; j < st.qgrid.n; ++j) {
            const double u = st.qgrid.q(j) - center;
            const double arg = -u * u / (4.0 * sig2);
            if (arg < -745.0) continue;  // exp underflows to zero anyway
            // the translated packet is Phi0(Q - c), carrier phase included:
            // exp(i k_pointer (Q - c)), not exp(i k_pointer Q) -- the relative
            // phases e^{-i k_pointer c_m} between mode packets carry the whole
            // first-order k_pointer response of the postselection probability
            st.phi[j] += coeff * (norm_factor * std::exp(arg)) *
                         std::exp(cplx(0.0, s.k_pointer * u));
        }
    }

    double total = 0.0, boundary = 0.0;
    for (int j = 0; j < st.qgrid.n; ++j) {
        const double w = trapezoid_weight(j, st.qgrid.n, st.qgrid.dq);
        const double rho = std::norm(st.phi[j]);
        total += w * rho;
        if (j < 3 || j >= st.qgrid.n - 3) boundary += w * rho;
    }
    st.prob_density = total;
    if (total > 0.0 && boundary / total > 1e-10) {
        throw PointerGridTooNarrow("pointer distribution leaks " + std::to_string(boundary / total) +
                                   " of its mass into the outer three grid cells");
    }
    return st;
}

PointerMoments pointer_moments(const PointerState& st, const PhysicalConstants& consts) {
    PointerMoments m;
    m.prob_density = st.prob_density;
    m.dq = st.qgrid.dq;
    const int n = st.qgrid.n;

    double wsum = 0.0, q1 = 0.0, q2 = 0.0;
    for (int j = 0; j < n; ++j) {
        const double w = trapezoid_weight(j, n, st.qgrid.dq) * std::norm(st.phi[j]);
        const double q = st.qgrid.q(j);
        wsum += w;
        q1 += w * q;
        q2 += w * q * q;
    }
    if (wsum <= 0.0) throw ZeroProbability("pointer state carries no probability at this site");
    m.mean_q = q1 / wsum;
    m.var_q = q2 / wsum - m.mean_q * m.mean_q;

    const std::vector<cplx> phi_tilde = fft::forward(st.phi);
    const double dk = 2.0 * M_PI / (st.qgrid.dq * n);
    m.dp = consts.hbar * dk;
    double psum = 0.0, p1 = 0.0, p2 = 0.0;
    for (int j = 0; j < n; ++j) {
        const int m_signed = (j < (n + 1) / 2) ? j : j - n;
        const double p = consts.hbar * dk * m_signed;
        const double w = std::norm(phi_tilde[j]);
        psum += w;
        p1 += w * p;
        p2 += w * p * p;
    }
    if (psum <= 0.0) throw ZeroProbability("pointer momentum distribution is empty");
    m.mean_p = p1 / psum;
    m.var_p = p2 / psum - m.mean_p * m.mean_p;
    return m;
}

double first_order_density(double density, double im_wv, const MeterSettings& s,
                           const PhysicalConstants& consts) {
    return density * (1.0 + 2.0 * s.g * consts.hbar * s.k_pointer * im_wv);
}

double postselection_probability_first_order(const WaveFunction& psi, int site,
                                             const MeterSettings& s,
                                             const PhysicalConstants& consts, double threshold) {
    const WeakValueField f = weak_value_momentum(psi, consts, threshold);
    if (site < 0 || static_cast<std::size_t>(site) >= psi.grid.n)
        throw Error("probe site index out of range");
    if (!f.mask[site])
        throw MaskedSite("site " + std::to_string(site) +
                         " is below the density threshold; the weak value diverges there");
    return first_order_density(std::norm(psi.amp[site]), f.wv[site].imag(), s, consts);
}

WeakValueEstimate estimate_weak_value(double mean_q, double sd_q, double mean_p, double sd_p,
                                      long long n_samples, const MeterSettings& s,
                                      const PhysicalConstants& consts) {
    if (s.g == 0.0) throw ZeroCoupling("weak-value estimators divide by the coupling g");
    const double varp_th = consts.hbar * consts.hbar / (4.0 * s.sigma_q * s.sigma_q);
    WeakValueEstimate e;
    e.re = mean_q / s.g;
    e.im = (mean_p - consts.hbar * s.k_pointer) / (2.0 * s.g * varp_th);
    if (n_samples > 0) {
        const double root_n = std::sqrt(static_cast<double>(n_samples));
        e.se_re = sd_q / (std::abs(s.g) * root_n);
        e.se_im = sd_p / (2.0 * std::abs(s.g) * varp_th * root_n);
    }
    return e;
}

WeakValueEstimate estimate_from_moments(const PointerMoments& m, long long n_samples,
                                        const MeterSettings& s, const PhysicalConstants& consts) {
    // The cell jitter used by the sampler adds width^2/12 to each variance.
    const double sd_q = std::sqrt(m.var_q + m.dq * m.dq / 12.0);
    const double sd_p = std::sqrt(m.var_p + m.dp * m.dp / 12.0);
    return estimate_weak_value(m.mean_q, sd_q, m.mean_p, sd_p, n_samples, s, consts);
}

ChannelDistribution position_channel(const PointerState& st) {
    ChannelDistribution ch;
    const int n = st.qgrid.n;
    ch.cell = st.qgrid.dq;
    ch.values.resize(n);
    ch.pmf.resize(n);
    for (int j = 0; j < n; ++j) {
        ch.values[j] = st.qgrid.q(j);
        ch.pmf[j] = trapezoid_weight(j, n, st.qgrid.dq) * std::norm(st.phi[j]);
    }
    return ch;
}

ChannelDistribution momentum_channel(const PointerState& st, const PhysicalConstants& consts) {
    ChannelDistribution ch;
    const int n = st.qgrid.n;
    const std::vector<cplx> phi_tilde = fft::forward(st.phi);
    const double dk = 2.0 * M_PI / (st.qgrid.dq * n);
    ch.cell = consts.hbar * dk;
    ch.values.resize(n);
    ch.pmf.resize(n);
    for (int j = 0; j < n; ++j) {
        const int m_signed = (j < (n + 1) / 2) ? j : j - n;
        ch.values[j] = consts.hbar * dk * m_signed;
        ch.pmf[j] = std::norm(phi_tilde[j]);
    }
    return ch;
}

SampleSummary sample_channel(const ChannelDistribution& ch, long long n, rng::RandomStream& rs) {
    if (n <= 0) throw Error("sample count must be positive");
    std::vector<double> cdf(ch.pmf.size());
    std::partial_sum(ch.pmf.begin(), ch.pmf.end(), cdf.begin());
    const double total = cdf.back();
    if (!(total > 0.0)) throw ZeroProbability("readout distribution has zero total mass");

    // Single pass Welford accumulation keeps the summary independent of n.
    double mean = 0.0, m2 = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double u = rs.next_double() * total;
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin()),
            cdf.size() - 1);
        const double value = ch.values[idx] + (rs.next_double() - 0.5) * ch.cell;
        const double delta = value - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (value - mean);
    }
    SampleSummary out;
    out.n = n;
    out.mean = mean;
    out.sd = (n > 1) ? std::sqrt(m2 / static_cast<double>(n - 1)) : 0.0;
    return out;
}

}  // namespace potmeter
