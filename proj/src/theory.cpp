#include "fracperc/theory.hpp"

#include <cmath>
#include <vector>

namespace fracperc {

namespace {

void require_supercritical(const ModelParams& P) {
    if (!P.supercritical())
        throw ConfigError("requires M^d p > 1, got M^d p = " +
                          std::to_string(double(P.branching()) * P.p));
}

}  // namespace

double fractal_dimension(const ModelParams& P) {
    P.validate();
    return P.dimension();
}

MomentReport gw_moments(const ModelParams& P, int n) {
    P.validate();
    if (n < 0) throw ConfigError("level must be >= 0");
    const double m1 = double(P.branching()) * P.p;  // offspring mean
    const double v1 = m1 * (1.0 - P.p);             // offspring variance
    MomentReport r;
    r.mean = std::pow(m1, n);
    if (m1 == 1.0) {
        r.variance = double(n) * v1;
    } else {
        r.variance = v1 / (m1 - 1.0) * std::pow(m1, n - 1) * (std::pow(m1, n) - 1.0);
    }
    return r;
}

MomentReport w_infinity_moments(const ModelParams& P) {
    P.validate();
    require_supercritical(P);
    MomentReport r;
    r.mean = 1.0;
    r.variance = (1.0 - P.p) / (double(P.branching()) * P.p - 1.0);
    return r;
}

MomentReport volume_moments(const ModelParams& P, int n) {
    P.validate();
    if (n < 0) throw ConfigError("level must be >= 0");
    const double K = double(P.branching());
    MomentReport r;
    r.mean = std::pow(P.p, n);
    if (K * P.p == 1.0) {
        r.variance = (1.0 - P.p) * double(n) * std::pow(P.p, 2 * n);
    } else {
        r.variance = (1.0 - P.p) / (K * P.p - 1.0) *
                     (std::pow(P.p, 2 * n) - std::pow(P.p, n) * std::pow(K, -n));
    }
    return r;
}

double volume_variance_sum_form(const ModelParams& P, int n) {
    P.validate();
    if (n < 0) throw ConfigError("level must be >= 0");
    const double m1 = double(P.branching()) * P.p;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += std::pow(m1, i - n);
    return std::pow(P.p, 2 * n) * (1.0 - P.p) * s;
}

MomentReport intersection_volume_moments(const ModelParams& P, int ell, int n) {
    if (ell < 1) throw ConfigError("intersection order must be >= 1");
    ModelParams Q = P;
    Q.p = std::pow(P.p, ell);
    return volume_moments(Q, n);
}

double surface_mean(const ModelParams& P, int n) {
    P.validate();
    if (n < 0) throw ConfigError("level must be >= 0");
    const double Mr = double(P.M);
    double e = double(P.d);
    for (int i = 1; i <= n; ++i)
        e = Mr * P.p * e - double(P.d) * (Mr - 1.0) * std::pow(P.p, 2 * i);
    return e;
}

double surface_mean_closed_form(const ModelParams& P, int n) {
    P.validate();
    if (n < 0) throw ConfigError("level must be >= 0");
    if (P.p == 1.0) return surface_mean(P, n);
    const double Mr = double(P.M);
    const double c1 = double(P.d) * Mr * (1.0 - P.p) / (Mr - P.p);
    return c1 * std::pow(Mr * P.p, n) *
           (1.0 + (Mr - 1.0) / (1.0 - P.p) * std::pow(P.p / Mr, n + 1));
}

SurfaceRecursionState surface_variance_exact(const ModelParams& P, int n) {
    P.validate();
    if (P.d < 2) throw ConfigError("boundary variance requires dimension >= 2");
    if (n < 0) throw ConfigError("level must be >= 0");
    const int d = P.d;
    const double Mr = double(P.M);
    const double p = P.p;
    const double p2 = p * p;
    const double Md = std::pow(Mr, d);
    const double Md1 = std::pow(Mr, d - 1);    // cells per facet layer
    const double Md1sq = Md1 * Md1;
    const double Md2 = std::pow(Mr, d - 2);

    // neighbor-pair and triple counts in the level-1 lattice
    const double pairs = double(d) * (Mr - 1.0) * Md1;
    const double rows3 = 2.0 * double(d) * (Mr - 2.0) * Md1;
    const double corners3 = 8.0 * double(d * (d - 1) / 2) * (Mr - 1.0) * (Mr - 1.0) * Md2;
    // ordered adjacent pairs inside one facet layer, feeding the corner chain
    const double cc_count = 2.0 * double(d - 1) * (Mr - 1.0) * Md2;

    std::vector<double> E(std::size_t(n) + 1), ivar(std::size_t(n) + 1), cc(std::size_t(n) + 1),
        gam(std::size_t(n) + 1), beta(std::size_t(n) + 1);
    E[0] = double(d);
    ivar[0] = cc[0] = gam[0] = beta[0] = 0.0;

    auto covrow = [&](int m) {
        return m >= 1 ? (1.0 - p) / Md1sq * std::pow(p, 4 * m - 1) : 0.0;
    };

    for (int m = 1; m <= n; ++m) {
        E[std::size_t(m)] = Mr * p * E[std::size_t(m - 1)] -
                            double(d) * (Mr - 1.0) * std::pow(p, 2 * m);
        // volume variance of a (d-1)-dimensional construction with retention p^2
        ivar[std::size_t(m)] = p2 / Md1 * ivar[std::size_t(m - 1)] +
                               (1.0 - p2) / (Md1 * p2) * std::pow(p2, 2 * m);
        cc[std::size_t(m)] = p * p2 / Md * cc[std::size_t(m - 1)] + covrow(m);
        if (m == 1) {
            gam[1] = 0.0;
        } else {
            double cov_a = p2 / Md1sq * gam[std::size_t(m - 1)] +
                           p2 * (1.0 - p) / Md1sq * (E[std::size_t(m - 2)] / Md1) *
                               (std::pow(p, 2 * (m - 2)) / Md1);
            double cov_b = covrow(m - 1) / Md1sq;
            gam[std::size_t(m)] = Md1 * (cov_a - cov_b) - cc_count / Md1sq * cc[std::size_t(m - 1)];
        }
        double varpair =
            p2 / Md1sq * (ivar[std::size_t(m - 1)] + (1.0 - p2) * std::pow(p2, 2 * (m - 1)));
        double covmix = p2 * gam[std::size_t(m)] +
                        p2 * (1.0 - p) * (E[std::size_t(m - 1)] / Md1) *
                            (std::pow(p, 2 * (m - 1)) / Md1);
        beta[std::size_t(m)] = p / Md2 * beta[std::size_t(m - 1)] +
                               p * (1.0 - p) / Md2 * E[std::size_t(m - 1)] * E[std::size_t(m - 1)] +
                               pairs * varpair + rows3 * covrow(m) + corners3 * cc[std::size_t(m)] -
                               4.0 * pairs * covmix;
    }

    SurfaceRecursionState s;
    s.n = n;
    s.E_X = E[std::size_t(n)];
    s.Var_X = beta[std::size_t(n)];
    s.gamma = gam[std::size_t(n)];
    s.corner_cov = cc[std::size_t(n)];
    s.inter_mean = std::pow(p2, n);
    s.inter_var = ivar[std::size_t(n)];
    return s;
}

SurfaceConstants surface_constants(const ModelParams& P) {
    P.validate();
    require_supercritical(P);
    SurfaceConstants c;
    const double Mr = double(P.M);
    c.c1 = double(P.d) * Mr * (1.0 - P.p) / (Mr - P.p);
    c.c2 = c.c1 * c.c1 * (1.0 - P.p) / (double(P.branching()) * P.p - 1.0);
    return c;
}

SurfaceAsymptotic surface_variance_asymptotic(const ModelParams& P, int n) {
    P.validate();
    if (P.d < 2) throw ConfigError("boundary variance requires dimension >= 2");
    require_supercritical(P);
    SurfaceConstants c = surface_constants(P);
    const double Mr = double(P.M);
    SurfaceAsymptotic a;
    a.leading = c.c2 * std::pow(Mr * P.p, 2 * n);
    double gap = P.p * P.p - std::pow(Mr, 1 - P.d);
    if (gap > 0.0) {
        a.regime = SurfaceRegime::above;
        a.remainder_order = "O((M p^3)^n)";
    } else if (gap == 0.0) {
        a.regime = SurfaceRegime::boundary;
        a.remainder_order = "O((M p^3)^n n)";
    } else {
        a.regime = SurfaceRegime::below;
        a.remainder_order = "O((p / M^(d-2))^n)";
    }
    return a;
}

RateGap convergence_rate_predictions(const ModelParams& P, int n, int k) {
    P.validate();
    require_supercritical(P);
    if (n < 0) throw ConfigError("level must be >= 0");
    RateGap g;
    const double Mr = double(P.M);
    if (k == P.d) {
        g.mean_gap = 0.0;
        g.variance_gap = w_infinity_moments(P).variance * std::pow(double(P.branching()) * P.p, -n);
        g.variance_order = "O((M^d p)^(-n))";
        return g;
    }
    if (k == P.d - 1) {
        if (P.d < 2) throw ConfigError("boundary case requires dimension >= 2");
        g.mean_gap = double(P.d) * P.p * (Mr - 1.0) / (Mr - P.p) * std::pow(P.p / Mr, n);
        SurfaceConstants c = surface_constants(P);
        double var_n = surface_variance_exact(P, n).Var_X * std::pow(Mr * P.p, -2 * n);
        g.variance_gap = c.c2 - var_n;
        double regime = P.p * P.p - std::pow(Mr, 1 - P.d);
        if (regime > 0.0)
            g.variance_order = "O((p/M)^n)";
        else if (regime == 0.0)
            g.variance_order = "O((p/M)^n n)";
        else
            g.variance_order = "O((M^d p)^(-n))";
        return g;
    }
    throw ConfigError("rate predictions cover only the top two functionals");
}

}  // namespace fracperc
