#include "gmi/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gmi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd scalar_values(const DensityGrid& d) {
    Eigen::VectorXd out(d.size());
    for (int m = 0; m < d.size(); ++m) out(m) = d.values[m](0, 0).real();
    return out;
}

DensityGrid scalar_grid(const Eigen::VectorXd& v, std::string label) {
    DensityGrid d = DensityGrid::zeros(1, static_cast<int>(v.size()), std::move(label));
    for (int m = 0; m < d.size(); ++m) d.values[m](0, 0) = v(m);
    return d;
}

double weighted_mean(const Eigen::VectorXd& w, const Eigen::VectorXd& v) {
    double s = 0.0;
    for (int m = 0; m < v.size(); ++m)
        if (w(m) != 0.0) s += w(m) * v(m);
    return s / static_cast<double>(v.size());
}

// v(t) = clamp((t num - off) / den, lo, hi), nondecreasing in t
struct Pointwise {
    Eigen::VectorXd num, off, den, lo, hi, weight;
    double target = 0.0;

    Eigen::VectorXd eval(double t) const {
        const int M = static_cast<int>(num.size());
        Eigen::VectorXd v(M);
        for (int m = 0; m < M; ++m) {
            const double x = t * num(m) - off(m);
            if (!std::isfinite(num(m)) || den(m) <= 1e-14) {
                const bool up = std::isfinite(num(m)) ? x > 0.0 : t > 0.0;
                v(m) = (up && std::isfinite(hi(m))) ? hi(m) : lo(m);
            } else {
                v(m) = std::clamp(x / den(m), lo(m), hi(m));
            }
        }
        return v;
    }

    Eigen::VectorXd solve() const {
        const double scale = std::max(std::abs(target), 1e-300);
        Eigen::VectorXd v_lo = eval(0.0);
        double m_lo = weighted_mean(weight, v_lo);
        if (m_lo > target + 1e-9 * scale) throw ConfigError("class constraint infeasible: lower envelope exceeds the moment");
        if (m_lo >= target - 1e-13 * scale) return v_lo;
        double t_lo = 0.0, t_hi = 1.0;
        Eigen::VectorXd v_hi = eval(t_hi);
        double m_hi = weighted_mean(weight, v_hi);
        for (int i = 0; m_hi < target; ++i) {
            if (i > 200) throw ConfigError("class constraint infeasible: moment not reachable");
            t_lo = t_hi;
            v_lo = v_hi;
            m_lo = m_hi;
            t_hi *= 2.0;
            v_hi = eval(t_hi);
            m_hi = weighted_mean(weight, v_hi);
        }
        for (int i = 0; i < 200 && t_hi - t_lo > 1e-15 * t_hi; ++i) {
            const double t = 0.5 * (t_lo + t_hi);
            const Eigen::VectorXd v = eval(t);
            const double mv = weighted_mean(weight, v);
            if (mv < target) {
                t_lo = t, v_lo = v, m_lo = mv;
            } else {
                t_hi = t, v_hi = v, m_hi = mv;
            }
        }
        if (m_hi - m_lo <= 1e-300) return v_hi;
        const double theta = std::clamp((target - m_lo) / (m_hi - m_lo), 0.0, 1.0);
        return v_lo + theta * (v_hi - v_lo);
    }
};

Eigen::VectorXd abs2_beta(const IncrementSpec& spec, int M) {
    Eigen::VectorXd out(M);
    for (int m = 0; m < M; ++m) out(m) = std::norm(beta_transfer(spec, DensityGrid::grid_lambda(m, M)));
    return out;
}

Eigen::VectorXd signal_floor(const AdmissibleClass& cls, const Eigen::VectorXd& wf) {
    const int M = static_cast<int>(wf.size());
    if (cls.kind == AdmissibleClass::Kind::Contaminated) return (1.0 - cls.eps) * scalar_values(cls.anchor);
    Eigen::VectorXd lo(M);
    for (int m = 0; m < M; ++m) lo(m) = wf(m) > 0.0 ? 1e-9 * cls.moment / wf(m) : 0.0;
    return lo;
}

double class_target(const AdmissibleClass& cls, const Eigen::VectorXd& weight) {
    if (cls.kind == AdmissibleClass::Kind::Neighborhood)
        return weighted_mean(weight, scalar_values(cls.anchor)) + cls.delta;
    return cls.moment;
}

void class_bounds(const AdmissibleClass& cls, DensityRole role, const Eigen::VectorXd& weight, Eigen::VectorXd& lo,
                  Eigen::VectorXd& hi) {
    const int M = static_cast<int>(weight.size());
    hi = Eigen::VectorXd::Constant(M, kInf);
    switch (cls.kind) {
        case AdmissibleClass::Kind::Band:
            lo = scalar_values(cls.lower);
            hi = scalar_values(cls.upper);
            break;
        case AdmissibleClass::Kind::Neighborhood:
            lo = scalar_values(cls.anchor);
            break;
        case AdmissibleClass::Kind::Contaminated:
            lo = (1.0 - cls.eps) * scalar_values(cls.anchor);
            break;
        case AdmissibleClass::Kind::Moment:
            if (role == DensityRole::Signal) {
                lo = signal_floor(cls, weight);
            } else {
                lo = Eigen::VectorXd::Constant(M, 1e-9 * cls.moment);
            }
            break;
        case AdmissibleClass::Kind::Fixed:
            lo = hi = scalar_values(cls.anchor);
            break;
    }
}

Eigen::VectorXd initial_density(const AdmissibleClass& cls, DensityRole role, const Eigen::VectorXd& weight) {
    const int M = static_cast<int>(weight.size());
    Eigen::VectorXd lo, hi;
    class_bounds(cls, role, weight, lo, hi);
    if (cls.kind == AdmissibleClass::Kind::Fixed) return lo;
    Pointwise pp;
    pp.lo = lo;
    pp.hi = hi;
    pp.weight = weight;
    pp.target = class_target(cls, weight);
    pp.den = Eigen::VectorXd::Ones(M);
    pp.off = -lo;
    pp.num.resize(M);
    // flat increment spectrum above the lower envelope
    for (int m = 0; m < M; ++m) pp.num(m) = weight(m) > 0.0 ? 1.0 / weight(m) : 0.0;
    if (cls.kind == AdmissibleClass::Kind::Band) {
        pp.num = hi - lo;
        pp.off = -lo;
    }
    return pp.solve();
}

// free points of a scalar density and the breach of the sign conditions
EquationResidual fit_scalar(const std::string& name, const Eigen::VectorXd& ratio, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, const Eigen::VectorXd& usable,
                            double& multiplier, Eigen::VectorXd* g_lo, Eigen::VectorXd* g_hi) {
    const int M = static_cast<int>(x.size());
    const double scale = std::max(x.cwiseAbs().maxCoeff(), 1e-300);
    std::vector<int> free_pts, at_lo, at_hi;
    for (int m = 0; m < M; ++m) {
        if (usable(m) == 0.0 || !std::isfinite(ratio(m))) continue;
        const double margin = 1e-9 * scale;
        const bool on_lo = x(m) <= lo(m) + margin;
        const bool on_hi = std::isfinite(hi(m)) && x(m) >= hi(m) - margin;
        if (on_lo && on_hi) continue;
        if (on_lo) at_lo.push_back(m);
        else if (on_hi) at_hi.push_back(m);
        else free_pts.push_back(m);
    }
    EquationResidual r;
    r.name = name;
    r.free_points = static_cast<int>(free_pts.size());
    if (!free_pts.empty()) {
        double s = 0.0;
        for (int m : free_pts) s += ratio(m);
        multiplier = s / free_pts.size();
    } else {
        double below = 0.0, above = kInf;
        for (int m : at_lo) below = std::max(below, ratio(m));
        for (int m : at_hi) above = std::min(above, ratio(m));
        multiplier = std::isfinite(above) ? 0.5 * (below + above) : below;
        if (!at_lo.empty() && std::isfinite(above)) multiplier = std::min(std::max(below, multiplier), above);
    }
    const double denom = std::max(multiplier, 1e-300);
    for (int m : free_pts) r.residual = std::max(r.residual, std::abs(ratio(m) / denom - 1.0));
    if (g_lo) *g_lo = Eigen::VectorXd::Zero(M);
    if (g_hi) *g_hi = Eigen::VectorXd::Zero(M);
    for (int m : at_lo) {
        r.sign_violation = std::max(r.sign_violation, (ratio(m) - multiplier) / denom);
        if (g_lo) (*g_lo)(m) = std::min(ratio(m) - multiplier, 0.0);
    }
    for (int m : at_hi) {
        r.sign_violation = std::max(r.sign_violation, (multiplier - ratio(m)) / denom);
        if (g_hi) (*g_hi)(m) = std::max(ratio(m) - multiplier, 0.0);
    }
    return r;
}

SaddleReport scalar_report(const Eigen::VectorXd& f, const Eigen::VectorXd& g, const ForecastSolution& sol,
                           const AdmissibleClass& fc, const AdmissibleClass& gc, const Eigen::VectorXd& wf,
                           const Eigen::VectorXd& wg, const IncrementSpec& spec, const FunctionalSpec& fn,
                           double residual_tol) {
    const int M = static_cast<int>(f.size());
    const Sensitivity sens = value_sensitivity(sol.h, spec, fn, M);
    const Eigen::VectorXd b2 = abs2_beta(spec, M);
    SaddleReport rep;
    rep.value = sol.mse;
    rep.gamma_lower = Eigen::VectorXd::Zero(M);
    rep.gamma_upper = Eigen::VectorXd::Zero(M);
    if (fc.kind != AdmissibleClass::Kind::Fixed) {
        Eigen::VectorXd lo, hi, ratio(M), usable(M);
        class_bounds(fc, DensityRole::Signal, wf, lo, hi);
        for (int m = 0; m < M; ++m) {
            usable(m) = wf(m) > 0.0 ? 1.0 : 0.0;
            ratio(m) = wf(m) > 0.0 ? sens.Kf(m) / wf(m) : 0.0;
        }
        rep.equations.push_back(fit_scalar("signal", ratio, f, lo, hi, usable, rep.alpha_f, nullptr, nullptr));
        EquationResidual mom{"signal moment", std::abs(weighted_mean(wf, f) - class_target(fc, wf)) /
                                                  std::max(class_target(fc, wf), 1e-300), 0.0, M};
        rep.equations.push_back(mom);
    }
    if (gc.kind != AdmissibleClass::Kind::Fixed) {
        Eigen::VectorXd lo, hi, ratio(M), usable(M);
        class_bounds(gc, DensityRole::Noise, wg, lo, hi);
        for (int m = 0; m < M; ++m) {
            usable(m) = (wg(m) > 0.0 && b2(m) > 1e-14) ? 1.0 : 0.0;
            ratio(m) = wg(m) > 0.0 ? sens.Kg(m) / wg(m) : 0.0;
        }
        rep.equations.push_back(
            fit_scalar("noise", ratio, g, lo, hi, usable, rep.beta, &rep.gamma_lower, &rep.gamma_upper));
        const double target = class_target(gc, wg);
        EquationResidual mom{"noise moment", std::abs(weighted_mean(wg, g) - target) / std::max(target, 1e-300), 0.0,
                             M};
        rep.equations.push_back(mom);
    }
    for (const auto& e : rep.equations) rep.max_violation = std::max({rep.max_violation, e.residual, e.sign_violation});
    rep.pass = rep.max_violation <= residual_tol;
    return rep;
}

bool is_signal_kind(AdmissibleClass::Kind k) {
    return k == AdmissibleClass::Kind::Fixed || k == AdmissibleClass::Kind::Moment ||
           k == AdmissibleClass::Kind::Contaminated;
}

bool is_noise_kind(AdmissibleClass::Kind k) {
    return k == AdmissibleClass::Kind::Fixed || k == AdmissibleClass::Kind::Moment ||
           k == AdmissibleClass::Kind::Band || k == AdmissibleClass::Kind::Neighborhood;
}

}  // namespace

AdmissibleClass AdmissibleClass::fixed(DensityGrid d) {
    AdmissibleClass c;
    c.kind = Kind::Fixed;
    c.anchor = std::move(d);
    return c;
}

AdmissibleClass AdmissibleClass::moment_class(double P, int variant) {
    AdmissibleClass c;
    c.kind = Kind::Moment;
    c.moment = P;
    c.variant = variant;
    return c;
}

AdmissibleClass AdmissibleClass::band(DensityGrid V, DensityGrid U, double Q, int variant) {
    AdmissibleClass c;
    c.kind = Kind::Band;
    c.lower = std::move(V);
    c.upper = std::move(U);
    c.moment = Q;
    c.variant = variant;
    return c;
}

AdmissibleClass AdmissibleClass::contaminated(DensityGrid f1, double eps, double P, int variant) {
    AdmissibleClass c;
    c.kind = Kind::Contaminated;
    c.anchor = std::move(f1);
    c.eps = eps;
    c.moment = P;
    c.variant = variant;
    return c;
}

AdmissibleClass AdmissibleClass::neighborhood(DensityGrid g1, double delta, int variant) {
    AdmissibleClass c;
    c.kind = Kind::Neighborhood;
    c.anchor = std::move(g1);
    c.delta = delta;
    c.variant = variant;
    return c;
}

std::string AdmissibleClass::describe() const {
    switch (kind) {
        case Kind::Fixed: return "fixed";
        case Kind::Moment: return "moment " + std::to_string(moment);
        case Kind::Band: return "band, moment " + std::to_string(moment);
        case Kind::Contaminated: return "contaminated, eps " + std::to_string(eps);
        case Kind::Neighborhood: return "neighborhood, delta " + std::to_string(delta);
    }
    return "?";
}

Eigen::VectorXd class_weight(const AdmissibleClass& cls, DensityRole role, const IncrementSpec& spec, int M) {
    if (cls.weight.size() == M) return cls.weight;
    if (cls.weight.size() != 0) throw ConfigError("class weight does not match the grid");
    if (role == DensityRole::Noise) return Eigen::VectorXd::Ones(M);
    Eigen::VectorXd w(M);
    for (int m = 0; m < M; ++m) w(m) = std::norm(kernel_ratio(spec, DensityGrid::grid_lambda(m, M)));
    return w;
}

void validate(const AdmissibleClass& cls, DensityRole role, const IncrementSpec& spec, int M) {
    using K = AdmissibleClass::Kind;
    auto need = [&](const DensityGrid& d, const char* what) {
        if (d.size() != M) throw ConfigError(std::string(what) + " does not match the grid of " + std::to_string(M));
    };
    if (role == DensityRole::Signal && !is_signal_kind(cls.kind))
        throw ConfigError("class kind not available for the signal density: " + cls.describe());
    if (role == DensityRole::Noise && !is_noise_kind(cls.kind))
        throw ConfigError("class kind not available for the noise density: " + cls.describe());
    if (cls.variant < 1 || cls.variant > 4) throw ConfigError("class variant must be 1..4");
    const Eigen::VectorXd w = class_weight(cls, role, spec, M);
    switch (cls.kind) {
        case K::Fixed:
            need(cls.anchor, "fixed density");
            break;
        case K::Moment:
            if (!(cls.moment > 0.0)) throw ConfigError("moment constant must be positive");
            break;
        case K::Band: {
            need(cls.lower, "lower band");
            need(cls.upper, "upper band");
            if (!(cls.moment > 0.0)) throw ConfigError("moment constant must be positive");
            for (int m = 0; m < M; ++m) {
                const CMatrix gap = cls.upper.values[m] - cls.lower.values[m];
                Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (gap + gap.adjoint()), Eigen::EigenvaluesOnly);
                if (es.eigenvalues().minCoeff() < -1e-12) throw ConfigError("band needs lower <= upper");
            }
            if (cls.lower.T == 1) {
                const double lo = weighted_mean(w, scalar_values(cls.lower));
                const double hi = weighted_mean(w, scalar_values(cls.upper));
                if (cls.moment < lo * (1 - 1e-12) || cls.moment > hi * (1 + 1e-12))
                    throw ConfigError("band moment outside [mean lower, mean upper]");
            }
            break;
        }
        case K::Contaminated:
            need(cls.anchor, "contamination anchor");
            if (!(cls.eps >= 0.0 && cls.eps < 1.0)) throw ConfigError("eps must lie in [0, 1)");
            if (!(cls.moment > 0.0)) throw ConfigError("moment constant must be positive");
            if (cls.anchor.T == 1 &&
                (1.0 - cls.eps) * weighted_mean(w, scalar_values(cls.anchor)) > cls.moment * (1 + 1e-9))
                throw ConfigError("contaminated class empty: (1 - eps) f1 exceeds the moment");
            break;
        case K::Neighborhood:
            need(cls.anchor, "neighborhood anchor");
            if (!(cls.delta >= 0.0)) throw ConfigError("delta must be nonnegative");
            break;
    }
}

bool contains(const AdmissibleClass& cls, DensityRole role, const IncrementSpec& spec, const DensityGrid& d,
              double tol) {
    const int M = d.size();
    if (d.T != 1) throw ConfigError("membership test is scalar only");
    const Eigen::VectorXd w = class_weight(cls, role, spec, M);
    const Eigen::VectorXd x = scalar_values(d);
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    if (x.minCoeff() < -tol * scale) return false;
    switch (cls.kind) {
        case AdmissibleClass::Kind::Fixed:
            return (x - scalar_values(cls.anchor)).cwiseAbs().maxCoeff() <= tol * scale;
        case AdmissibleClass::Kind::Moment:
            return std::abs(weighted_mean(w, x) - cls.moment) <= tol * std::max(1.0, cls.moment);
        case AdmissibleClass::Kind::Band: {
            const Eigen::VectorXd lo = scalar_values(cls.lower), hi = scalar_values(cls.upper);
            for (int m = 0; m < M; ++m)
                if (x(m) < lo(m) - tol * scale || x(m) > hi(m) + tol * scale) return false;
            return std::abs(weighted_mean(w, x) - cls.moment) <= tol * std::max(1.0, cls.moment);
        }
        case AdmissibleClass::Kind::Contaminated: {
            const Eigen::VectorXd lo = (1.0 - cls.eps) * scalar_values(cls.anchor);
            for (int m = 0; m < M; ++m)
                if (x(m) < lo(m) - tol * scale) return false;
            return std::abs(weighted_mean(w, x) - cls.moment) <= tol * std::max(1.0, cls.moment);
        }
        case AdmissibleClass::Kind::Neighborhood: {
            const Eigen::VectorXd dev = (x - scalar_values(cls.anchor)).cwiseAbs();
            return weighted_mean(w, dev) <= cls.delta + tol * std::max(1.0, cls.delta);
        }
    }
    return false;
}

ForecastSolution minimax_characteristic(const DensityGrid& f0, const DensityGrid& g0, const IncrementSpec& spec,
                                        const FunctionalSpec& fn, const ForecastOptions& opts) {
    return spectral_characteristic(f0, g0, spec, fn, opts);
}

double value_functional(const CMatrix& h, const DensityGrid& f, const DensityGrid& g, const IncrementSpec& spec,
                        const FunctionalSpec& fn) {
    check_same_grid(f, g);
    const int M = f.size();
    if (h.cols() != M || h.rows() != f.T) throw ConfigError("characteristic does not match the density grid");
    const CMatrix B = synthesize_weights(b_and_v_weights(fn.a, spec).b, M, 1);
    const CMatrix A = synthesize_weights(fn.a, M, 1);
    double total = 0.0;
    for (int m = 0; m < M; ++m) {
        const double l = f.lambda(m);
        const CVector e1 = kernel_ratio(spec, l) * B.col(m) - h.col(m);
        const CVector e2 = beta_transfer(spec, l) * e1 - A.col(m);
        total += (e1.transpose() * f.values[m] * e1.conjugate())(0).real();
        total += (e2.transpose() * g.values[m] * e2.conjugate())(0).real();
    }
    return total / M;
}

Sensitivity value_sensitivity(const CMatrix& h, const IncrementSpec& spec, const FunctionalSpec& fn, int M) {
    if (h.rows() != 1) throw ConfigError("sensitivities are scalar only");
    const CMatrix B = synthesize_weights(b_and_v_weights(fn.a, spec).b, M, 1);
    const CMatrix A = synthesize_weights(fn.a, M, 1);
    Sensitivity s{Eigen::VectorXd(M), Eigen::VectorXd(M)};
    for (int m = 0; m < M; ++m) {
        const double l = DensityGrid::grid_lambda(m, M);
        const Complex e1 = kernel_ratio(spec, l) * B(0, m) - h(0, m);
        const Complex e2 = beta_transfer(spec, l) * e1 - A(0, m);
        s.Kf(m) = std::norm(e1);
        s.Kg(m) = std::norm(e2);
    }
    return s;
}

LeastFavorable solve_least_favorable(const AdmissibleClass& fc, const AdmissibleClass& gc, const IncrementSpec& spec,
                                     const FunctionalSpec& fn, const MinimaxOptions& opts) {
    if (fn.a.dim() != 1) throw ConfigError("least favorable densities are solved for scalar sequences only");
    const int M = opts.grid;
    validate(fc, DensityRole::Signal, spec, M);
    validate(gc, DensityRole::Noise, spec, M);
    if (!(opts.damping > 0.0 && opts.damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
    const Eigen::VectorXd wf = class_weight(fc, DensityRole::Signal, spec, M);
    const Eigen::VectorXd wg = class_weight(gc, DensityRole::Noise, spec, M);
    const Eigen::VectorXd b2 = abs2_beta(spec, M);

    Eigen::VectorXd f = initial_density(fc, DensityRole::Signal, wf);
    Eigen::VectorXd g = initial_density(gc, DensityRole::Noise, wg);
    Eigen::VectorXd f_lo, f_hi, g_lo, g_hi;
    class_bounds(fc, DensityRole::Signal, wf, f_lo, f_hi);
    class_bounds(gc, DensityRole::Noise, wg, g_lo, g_hi);

    LeastFavorable out;
    int it = 0;
    double change = kInf;
    bool converged = false;
    for (; it < opts.max_iter; ++it) {
        const ForecastSolution sol =
            spectral_characteristic(scalar_grid(f, "f"), scalar_grid(g, "g"), spec, fn, opts.forecast);
        const Sensitivity sens = value_sensitivity(sol.h, spec, fn, M);
        const Eigen::VectorXd p = f + b2.cwiseProduct(g);

        Eigen::VectorXd f_new = f;
        if (fc.kind != AdmissibleClass::Kind::Fixed) {
            Pointwise pp;
            pp.num.resize(M);
            for (int m = 0; m < M; ++m) pp.num(m) = wf(m) > 0.0 ? std::sqrt(sens.Kf(m) / wf(m)) * p(m) : kInf;
            pp.off = b2.cwiseProduct(g);
            pp.den = Eigen::VectorXd::Ones(M);
            pp.lo = f_lo;
            pp.hi = f_hi;
            pp.weight = wf;
            pp.target = class_target(fc, wf);
            f_new = pp.solve();
        }
        Eigen::VectorXd g_new = g;
        if (gc.kind != AdmissibleClass::Kind::Fixed) {
            Pointwise pp;
            pp.num.resize(M);
            for (int m = 0; m < M; ++m) pp.num(m) = wg(m) > 0.0 ? std::sqrt(sens.Kg(m) / wg(m)) * p(m) : kInf;
            pp.off = f_new;
            pp.den = b2;
            pp.lo = g_lo;
            pp.hi = g_hi;
            pp.weight = wg;
            pp.target = class_target(gc, wg);
            g_new = pp.solve();
        }
        change = std::max((f_new - f).cwiseAbs().maxCoeff() / std::max(f.cwiseAbs().maxCoeff(), 1e-300),
                          (g_new - g).cwiseAbs().maxCoeff() / std::max(g.cwiseAbs().maxCoeff(), 1e-300));
        if (change < opts.tol) {
            f = f_new;
            g = g_new;
            converged = true;
            ++it;
            break;
        }
        f = (1.0 - opts.damping) * f + opts.damping * f_new;
        g = (1.0 - opts.damping) * g + opts.damping * g_new;
    }
    out.f0 = scalar_grid(f, "f0");
    out.g0 = scalar_grid(g, "g0");
    out.solution = spectral_characteristic(out.f0, out.g0, spec, fn, opts.forecast);
    out.report = scalar_report(f, g, out.solution, fc, gc, wf, wg, spec, fn, opts.residual_tol);
    out.report.iterations = it;
    out.report.converged = converged;
    out.report.last_change = change;
    out.report.pass = out.report.pass && converged;
    if (!converged)
        out.report.message = "no convergence after " + std::to_string(it) + " iterations, last change " +
                             std::to_string(change);
    return out;
}

LeastFavorable solve_lf_band(const AdmissibleClass& fc, const AdmissibleClass& gc, const IncrementSpec& spec,
                             const FunctionalSpec& fn, const MinimaxOptions& opts) {
    using K = AdmissibleClass::Kind;
    if (fc.kind != K::Fixed && fc.kind != K::Moment) throw ConfigError("signal class must be a moment class");
    if (gc.kind != K::Fixed && gc.kind != K::Band && gc.kind != K::Moment)
        throw ConfigError("noise class must be a band class");
    return solve_least_favorable(fc, gc, spec, fn, opts);
}

LeastFavorable solve_lf_eps_delta(const AdmissibleClass& fc, const AdmissibleClass& gc, const IncrementSpec& spec,
                                  const FunctionalSpec& fn, const MinimaxOptions& opts) {
    using K = AdmissibleClass::Kind;
    if (fc.kind != K::Fixed && fc.kind != K::Contaminated)
        throw ConfigError("signal class must be an eps-contamination class");
    if (gc.kind != K::Fixed && gc.kind != K::Neighborhood)
        throw ConfigError("noise class must be a delta-neighborhood class");
    return solve_least_favorable(fc, gc, spec, fn, opts);
}

DensityGrid sample_admissible(const AdmissibleClass& cls, DensityRole role, const IncrementSpec& spec, int M,
                              std::mt19937_64& rng, const DensityGrid* center) {
    validate(cls, role, spec, M);
    if (cls.kind == AdmissibleClass::Kind::Fixed) return cls.anchor;
    const Eigen::VectorXd w = class_weight(cls, role, spec, M);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> degree(0, 8);

    // nonnegative trigonometric polynomial |sum c_k e^{ik lambda}|^2
    const int deg = degree(rng);
    Eigen::VectorXd c(deg + 1);
    for (int k = 0; k <= deg; ++k) c(k) = normal(rng);
    Eigen::VectorXd q(M);
    for (int m = 0; m < M; ++m) {
        const double l = DensityGrid::grid_lambda(m, M);
        Complex s = 0.0;
        for (int k = 0; k <= deg; ++k) s += c(k) * std::polar(1.0, k * l);
        q(m) = std::norm(s) + 1e-3 * c.squaredNorm();
    }
    Eigen::VectorXd inv_w(M);
    for (int m = 0; m < M; ++m) inv_w(m) = w(m) > 0.0 ? 1.0 / w(m) : 0.0;

    Eigen::VectorXd x;
    switch (cls.kind) {
        case AdmissibleClass::Kind::Moment: {
            const Eigen::VectorXd shape = q.cwiseProduct(inv_w);
            x = cls.moment / weighted_mean(w, shape) * shape;
            break;
        }
        case AdmissibleClass::Kind::Contaminated: {
            const Eigen::VectorXd base = (1.0 - cls.eps) * scalar_values(cls.anchor);
            const Eigen::VectorXd shape = q.cwiseProduct(inv_w);
            const double rest = std::max(cls.moment - weighted_mean(w, base), 0.0);
            x = base + rest / weighted_mean(w, shape) * shape;
            break;
        }
        case AdmissibleClass::Kind::Neighborhood: {
            const Eigen::VectorXd shape = q.cwiseProduct(inv_w);
            x = scalar_values(cls.anchor) + unit(rng) * cls.delta / weighted_mean(w, shape) * shape;
            break;
        }
        case AdmissibleClass::Kind::Band: {
            const Eigen::VectorXd lo = scalar_values(cls.lower), hi = scalar_values(cls.upper);
            const Eigen::VectorXd r = q / q.maxCoeff();
            const Eigen::VectorXd start = lo + r.cwiseProduct(hi - lo);
            Pointwise pp;
            pp.num = hi - lo;
            pp.off = hi - lo - start;
            pp.den = Eigen::VectorXd::Ones(M);
            pp.lo = lo;
            pp.hi = hi;
            pp.weight = w;
            pp.target = cls.moment;
            x = pp.solve();
            break;
        }
        case AdmissibleClass::Kind::Fixed:
            break;
    }
    if (center && unit(rng) < 0.5) {
        const double t = unit(rng);
        x = (1.0 - t) * scalar_values(*center) + t * x;
    }
    return scalar_grid(x, role == DensityRole::Signal ? "f" : "g");
}

SampleAudit verify_saddle(const DensityGrid& f0, const DensityGrid& g0, const AdmissibleClass& fc,
                          const AdmissibleClass& gc, const IncrementSpec& spec, const FunctionalSpec& fn, int samples,
                          std::uint64_t seed, double tol, const ForecastOptions& opts) {
    if (samples < 0) throw ConfigError("sample count must be nonnegative");
    const int M = f0.size();
    const ForecastSolution sol = minimax_characteristic(f0, g0, spec, fn, opts);
    SampleAudit audit;
    audit.samples = samples;
    audit.tol = tol;
    audit.value = value_functional(sol.h, f0, g0, spec, fn);
    audit.worst_value = audit.value;
    audit.worst_excess = -kInf;
    std::mt19937_64 rng(seed);
    for (int i = 0; i < samples; ++i) {
        const DensityGrid f = sample_admissible(fc, DensityRole::Signal, spec, M, rng, &f0);
        const DensityGrid g = sample_admissible(gc, DensityRole::Noise, spec, M, rng, &g0);
        const double v = value_functional(sol.h, f, g, spec, fn);
        audit.values.push_back(v);
        audit.worst_value = std::max(audit.worst_value, v);
        const double excess = (v - audit.value) / std::max(1.0, audit.value);
        audit.worst_excess = std::max(audit.worst_excess, excess);
        if (excess > tol) ++audit.violations;
    }
    if (samples == 0) audit.worst_excess = 0.0;
    audit.pass = audit.violations == 0;
    return audit;
}

namespace {

// lowest eigenvalue of the Hermitian part, or trace / diagonal / pairing per class variant
double margin(const CMatrix& d, int variant, const CMatrix& pairing) {
    const CMatrix h = 0.5 * (d + d.adjoint());
    switch (variant) {
        case 2: return h.trace().real();
        case 3: return h.diagonal().real().minCoeff();
        case 4: return (pairing * h).trace().real();
        default: {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
            return es.eigenvalues().minCoeff();
        }
    }
}

// least-squares constant of the variant's structure
CMatrix fit_constant(const std::vector<CMatrix>& xs, int variant, const CMatrix& pairing) {
    const int T = static_cast<int>(xs.front().rows());
    CMatrix mean = CMatrix::Zero(T, T);
    for (const auto& x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    switch (variant) {
        case 2: return (mean.trace().real() / T) * CMatrix::Identity(T, T);
        case 3: return CMatrix(mean.diagonal().real().cast<Complex>().asDiagonal());
        case 4: {
            const CMatrix B = pairing.transpose();
            const Complex c = (B.adjoint() * mean).trace() / (B.adjoint() * B).trace();
            return c.real() * B;
        }
        default: return 0.5 * (mean + mean.adjoint());
    }
}

double max_eig(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

EquationResidual matrix_fit(const std::string& name, const std::vector<CMatrix>& X, const std::vector<int>& state,
                            int variant, const CMatrix& pairing, double& multiplier) {
    // state: 0 free, -1 on lower bound, +1 on upper bound, 2 unusable
    std::vector<CMatrix> free_x;
    for (size_t m = 0; m < X.size(); ++m)
        if (state[m] == 0) free_x.push_back(X[m]);
    EquationResidual r;
    r.name = name;
    r.free_points = static_cast<int>(free_x.size());
    if (free_x.empty()) {
        multiplier = 0.0;
        return r;
    }
    const CMatrix fit = fit_constant(free_x, variant, pairing);
    const double norm = std::max(fit.norm(), 1e-300);
    multiplier = fit.trace().real() / fit.rows();
    for (size_t m = 0; m < X.size(); ++m) {
        const CMatrix dev = X[m] - fit;
        if (state[m] == 0) r.residual = std::max(r.residual, dev.norm() / norm);
        if (state[m] == -1) r.sign_violation = std::max(r.sign_violation, max_eig(dev) / norm);
        if (state[m] == 1) r.sign_violation = std::max(r.sign_violation, max_eig(-dev) / norm);
    }
    return r;
}

}  // namespace

SaddleReport matrix_equation_residual(const DensityGrid& f0, const DensityGrid& g0, const AdmissibleClass& fc,
                                      const AdmissibleClass& gc, const IncrementSpec& spec, const FunctionalSpec& fn,
                                      EquationForm form, const ForecastOptions& opts, int factor_length) {
    using K = AdmissibleClass::Kind;
    check_same_grid(f0, g0);
    const int M = f0.size();
    const int T = f0.T;
    const ForecastSolution sol = form == EquationForm::Direct
                                     ? spectral_characteristic(f0, g0, spec, fn, opts)
                                     : factorized_forecast(f0, g0, spec, fn, factor_length, opts);
    const Eigen::VectorXd w = increment_weight(spec, M);
    const CMatrix B = synthesize_weights(sol.b, M, 1);
    const CMatrix A = synthesize_weights(sol.a, M, 1);
    const CMatrix Amu = synthesize_weights(sol.a_mu, M, 1);
    const CMatrix C = synthesize_weights(sol.c, M, 1);

    std::vector<CMatrix> Xf(M), Xg(M);
    std::vector<bool> g_usable(M, true);
    for (int m = 0; m < M; ++m) {
        const double l = f0.lambda(m);
        const Complex beta = beta_transfer(spec, l);
        const double b2 = std::norm(beta);
        if (form == EquationForm::Direct) {
            const Complex chi = chi_transfer(spec, l);
            const CMatrix p = f0.values[m] + b2 * g0.values[m];
            const CMatrix Winv = w(m) * p.inverse();
            const CVector cf = g0.values[m] * Amu.col(m) + C.col(m);
            Xf[m] = Winv * cf * cf.adjoint() * Winv;
            if (b2 > 1e-10) {
                const CVector cg = chi * (f0.values[m] * Amu.col(m) / b2 - C.col(m));
                Xg[m] = Winv * cg * cg.adjoint() * Winv;
            } else {
                Xg[m] = CMatrix::Zero(T, T);
                g_usable[m] = false;
            }
        } else {
            const CVector e1 = kernel_ratio(spec, l) * B.col(m) - sol.h.col(m);
            const CVector e2 = beta * e1 - A.col(m);
            Xf[m] = w(m) * e1 * e1.adjoint();
            Xg[m] = e2 * e2.adjoint();
            if (b2 <= 1e-10) g_usable[m] = false;
        }
    }

    SaddleReport rep;
    rep.value = sol.mse;
    rep.gamma_lower = Eigen::VectorXd::Zero(M);
    rep.gamma_upper = Eigen::VectorXd::Zero(M);
    const double tol_rel = 1e-9;
    if (fc.kind != K::Fixed) {
        std::vector<int> state(M, 0);
        double scale = 0.0;
        for (int m = 0; m < M; ++m) scale = std::max(scale, f0.values[m].norm());
        for (int m = 0; m < M; ++m) {
            CMatrix gap = f0.values[m];
            if (fc.kind == K::Contaminated) gap -= (1.0 - fc.eps) * fc.anchor.values[m];
            if (!std::isfinite(w(m))) state[m] = 2;
            else if (margin(gap, fc.variant, fc.pairing) <= tol_rel * scale) state[m] = -1;
        }
        rep.equations.push_back(matrix_fit("signal", Xf, state, fc.variant, fc.pairing, rep.alpha_f));
    }
    if (gc.kind != K::Fixed) {
        std::vector<int> state(M, 0);
        double scale = 0.0;
        for (int m = 0; m < M; ++m) scale = std::max(scale, g0.values[m].norm());
        for (int m = 0; m < M; ++m) {
            if (!g_usable[m]) {
                state[m] = 2;
                continue;
            }
            const CMatrix& lo = gc.kind == K::Band ? gc.lower.values[m] : gc.anchor.values[m];
            if (gc.kind == K::Band || gc.kind == K::Neighborhood) {
                if (margin(g0.values[m] - lo, gc.variant, gc.pairing) <= tol_rel * scale) state[m] = -1;
                if (gc.kind == K::Band && margin(gc.upper.values[m] - g0.values[m], gc.variant, gc.pairing) <= tol_rel * scale)
                    state[m] = state[m] == -1 ? 2 : 1;
            } else if (margin(g0.values[m], gc.variant, gc.pairing) <= tol_rel * scale) {
                state[m] = -1;
            }
        }
        rep.equations.push_back(matrix_fit("noise", Xg, state, gc.variant, gc.pairing, rep.beta));
        for (int m = 0; m < M; ++m) {
            const double v = Xg[m].trace().real() / T - rep.beta;
            if (state[m] == -1) rep.gamma_lower(m) = std::min(v, 0.0);
            if (state[m] == 1) rep.gamma_upper(m) = std::max(v, 0.0);
        }
    }
    for (const auto& e : rep.equations) rep.max_violation = std::max({rep.max_violation, e.residual, e.sign_violation});
    rep.pass = rep.max_violation <= 1e-4;
    rep.converged = true;
    return rep;
}

AdmissibleClass coint_noise_class(const AdmissibleClass& p_class, const DensityGrid& f, double alpha,
                                  const IncrementSpec& spec) {
    using K = AdmissibleClass::Kind;
    if (f.T != 1) throw ConfigError("cointegrated classes are scalar only");
    const int M = f.size();
    const double a2 = alpha * alpha;
    Eigen::VectorXd b2 = abs2_beta(spec, M), inv_w(M);
    for (int m = 0; m < M; ++m) inv_w(m) = std::norm(kernel_ratio(spec, f.lambda(m)));
    // p = alpha^2 f + |beta|^2 g, class integrals weighted by |chi|^2/|beta|^2
    auto to_noise = [&](const DensityGrid& p) {
        DensityGrid g = DensityGrid::zeros(1, M, "g");
        for (int m = 0; m < M; ++m) {
            if (b2(m) <= 1e-12) continue;
            g.values[m](0, 0) = (p.values[m](0, 0) - a2 * f.values[m](0, 0)) / b2(m);
        }
        return g;
    };
    AdmissibleClass out = p_class;
    out.weight = inv_w.cwiseProduct(b2);
    const double shift = weighted_mean(inv_w, a2 * scalar_values(f));
    switch (p_class.kind) {
        case K::Fixed:
            out.anchor = to_noise(p_class.anchor);
            out.weight.resize(0);
            break;
        case K::Band:
            out.lower = to_noise(p_class.lower);
            out.upper = to_noise(p_class.upper);
            for (int m = 0; m < M; ++m)
                if (b2(m) <= 1e-12) out.upper.values[m](0, 0) = 0.0;
            out.moment = p_class.moment - shift;
            break;
        case K::Moment:
            out.moment = p_class.moment - shift;
            break;
        case K::Neighborhood:
            out.anchor = to_noise(p_class.anchor);
            break;
        case K::Contaminated:
            throw ConfigError("contamination classes apply to the signal density");
    }
    return out;
}

}  // namespace gmi
