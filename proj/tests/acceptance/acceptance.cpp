// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cbs/coherence_analytics.hpp"
#include "cbs/runner.hpp"
#include "cbs/transport.hpp"

using namespace cbs;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

void criterion(int id, char const* title, std::function<Outcome()> const& body) {
    auto const start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (std::exception const& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++g_failures;
    std::printf("%s [%2d] %s (%.1f s)\n       %s\n", out.pass ? "PASS" : "FAIL", id, title, secs,
                out.detail.c_str());
    std::fflush(stdout);
}

TransportSettings slab(VelocityDistribution v, double delta, int max_order = 60) {
    TransportSettings t;
    t.geometry = MediumGeometry::slab(1000.0);
    t.velocity = v;
    t.laser_detuning = delta;
    t.max_order = max_order;
    return t;
}

EstimatorSettings budget(std::uint64_t photons, std::uint64_t seed) {
    EstimatorSettings e;
    e.photons = photons;
    e.seed = seed;
    return e;
}

std::string fmt(char const* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---------------------------------------------------------------------------
// 1. Static atoms: every path has q = 1, every populated order has c_N = 1.

Outcome static_perfection() {
    std::ostringstream os;
    bool ok = true;
    int idx = 0;
    for (auto geom : {MediumGeometry::slab(1000.0), MediumGeometry::sphere(13.0, 1000.0)}) {
        auto const start = std::chrono::steady_clock::now();
        TransportSettings t;
        t.geometry = geom;
        TransportEngine const engine(t);
        std::uint64_t const photons = 100000;
        double worst = 0.0;
        std::vector<OrderSample> samples;
        for (std::uint64_t p = 0; p < photons; ++p) {
            RandomStream rng(11, p);
            samples.clear();
            engine.evaluate_orders(engine.generate_path(rng), samples);
            for (auto const& s : samples) worst = std::max(worst, std::abs(s.ratio - 1.0));
        }
        auto const est = simulate(engine, budget(photons, 11));
        double worst_c = 0.0;
        int populated = 0;
        for (auto const& o : est.orders) {
            if (o.samples == 0) continue;
            ++populated;
            if (o.present) worst_c = std::max(worst_c, std::abs(o.contrast - 1.0));
        }
        double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        ok = ok && worst <= 1e-12 && worst_c <= 1e-12 && secs < 60.0;
        os << (idx++ ? "; " : "") << (geom.kind() == GeometryKind::Slab ? "slab" : "sphere b=13")
           << ": max|q-1| = " << worst << ", max|c_N-1| = " << worst_c << " over " << populated << " orders, "
           << fmt("%.1f s", secs);
    }
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 2./3. Low-velocity decay.

struct LowVelocityRuns {
    ContrastEstimate far;   // delta = 50
    ContrastEstimate zero;  // delta = 0
    ContrastEstimate five;  // delta = 5
};

LowVelocityRuns& low_velocity_runs() {
    static LowVelocityRuns runs = [] {
        auto const v = VelocityDistribution::gaussian(0.01);
        LowVelocityRuns r;
        r.far = contrast_per_order(slab(v, 50.0), budget(1000000, 2001));
        r.zero = contrast_per_order(slab(v, 0.0), budget(1000000, 2002));
        r.five = contrast_per_order(slab(v, 5.0), budget(1000000, 2003));
        return r;
    }();
    return runs;
}

Outcome decay_formula() {
    auto const& mc = low_velocity_runs().far;
    auto const report = mc_cross_check(mc, 0.01, 50.0, {2, 5, 10, 20, 40});
    std::ostringstream os;
    for (auto const& o : report.orders) {
        os << "N=" << o.order << " mc " << fmt("%.4f", o.mc) << "+-" << fmt("%.4f", o.mc_stderr) << " formula "
           << fmt("%.4f", o.analytic) << (o.within_tolerance ? " ok" : " OUT") << "; ";
    }
    os << (report.binding ? "binding" : "non-binding");
    return {report.binding && report.all_within_tolerance(), os.str()};
}

Outcome detuning_independence() {
    auto const& runs = low_velocity_runs();
    auto const* a = runs.zero.order(40);
    auto const* b = runs.five.order(40);
    auto const* c = runs.far.order(40);
    if (!a->present || !b->present) return {false, "order 40 not populated"};
    double const diff = std::abs(a->contrast - b->contrast);
    double const sigma = std::hypot(a->std_error, b->std_error);
    std::ostringstream os;
    os << "c_40(0) = " << fmt("%.4f", a->contrast) << "+-" << fmt("%.4f", a->std_error) << ", c_40(5) = "
       << fmt("%.4f", b->contrast) << "+-" << fmt("%.4f", b->std_error) << ", |diff| = " << fmt("%.4f", diff)
       << " vs 3 sigma = " << fmt("%.4f", 3 * sigma) << " (c_40(50) = " << fmt("%.4f", c->contrast) << ")";
    return {diff <= 3.0 * sigma, os.str()};
}

// ---------------------------------------------------------------------------
// 4. Contrast restoration off resonance.

Outcome restoration() {
    auto run = [](double kv, double delta, std::uint64_t seed) {
        return contrast_per_order(slab(VelocityDistribution::gaussian(kv), delta, 60), budget(200000, seed));
    };
    auto const on = run(1.0, 0.0, 41);
    auto const off = run(1.0, 50.0, 42);
    auto const hot_on = run(5.0, 0.0, 43);
    auto const hot_off = run(5.0, 50.0, 44);
    auto const *a = on.order(2), *b = off.order(2), *c = hot_on.order(2), *d = hot_off.order(2);
    double const gain = b->contrast - a->contrast;
    double const sigma = std::hypot(a->std_error, b->std_error);
    bool const improved = gain > 3.0 * sigma;
    bool const vanish = c->contrast < 0.1 && d->contrast < 0.1;
    std::ostringstream os;
    os << "kv=1: c_2(0) = " << fmt("%.4f", a->contrast) << "+-" << fmt("%.4f", a->std_error)
       << ", c_2(50) = " << fmt("%.4f", b->contrast) << "+-" << fmt("%.4f", b->std_error) << " (gain "
       << fmt("%.1f", gain / sigma) << " sigma); kv=5: c_2(0) = " << fmt("%.4f", c->contrast)
       << ", c_2(50) = " << fmt("%.4f", d->contrast);
    return {improved && vanish, os.str()};
}

// ---------------------------------------------------------------------------
// 5. Double scattering: velocity quadrature for fixed two-atom geometries.
//
// Per atom the amplitudes depend on the velocity only through s = k.v and
// t = k'.v. With x1 = t1 - s1 and y2 = s2 + t2 every mean index argument is
// laser + x1, laser - y2 or laser + x1 - y2, so a common step lets the mean
// response be tabulated once on a lattice. Trapezoid sums are
// geometrically convergent for these analytic integrands.

struct TwoAtomGeometry {
    double z1;       // depth of the first atom, in units of ell
    double r;        // separation, in units of ell
    double cos_phi;  // k . k'
    double azimuth;
};

Complex lorentz(double delta) { return Complex{0.0, 0.5} / Complex{delta, 0.5}; }

Complex gaussian_response(double delta, double sigma) {
    double const h = std::min(0.05, sigma / 4.0);
    int const n = static_cast<int>(std::ceil(12.0 * sigma / h));
    Complex sum{};
    double norm = 0.0;
    for (int i = -n; i <= n; ++i) {
        double const u = h * i;
        double const w = std::exp(-0.5 * u * u / (sigma * sigma));
        sum += w * lorentz(delta - u);
        norm += w;
    }
    return sum / norm;
}

double quadrature_c2(TwoAtomGeometry const& g, double sigma, double laser, double ell0, double ell) {
    double const c = g.cos_phi;
    // Atom 1 uses x = t - s, atom 2 uses y = s + t; s given either is normal
    // with mean -x/2 (resp. y/2).
    double const sx = sigma * std::sqrt(2.0 - 2.0 * c);
    double const sy = sigma * std::sqrt(2.0 + 2.0 * c);
    double const s1c = sigma * std::sqrt((1.0 + c) / 2.0);
    double const s2c = sigma * std::sqrt((1.0 - c) / 2.0);
    double const h = std::min(0.05, std::min(sx, sy) / 2.5);
    double const hs1 = std::min(0.05, s1c / 2.5);
    double const hs2 = std::min(0.05, s2c / 2.5);
    int const nx = static_cast<int>(std::ceil(8.5 * sx / h));
    int const ny = static_cast<int>(std::ceil(8.5 * sy / h));
    int const n1 = static_cast<int>(std::ceil(8.5 * s1c / hs1));
    int const n2 = static_cast<int>(std::ceil(8.5 * s2c / hs2));

    int const span = nx + ny;
    std::vector<Complex> chi(2 * span + 1);
    for (int m = -span; m <= span; ++m) chi[m + span] = gaussian_response(laser + m * h, sigma);
    auto chi_at = [&](int m) { return chi[m + span]; };

    double const z1 = g.z1 * ell;
    double const r = g.r * ell;
    double const z2 = z1 + r * g.cos_phi;
    auto leg = [&](Complex x, double len) { return std::exp(-x * len / (2.0 * ell0)); };
    auto gauss = [](double u, double s) { return std::exp(-0.5 * u * u / (s * s)); };

    Complex const entry = leg(chi_at(0), z1);      // direct entry at atom 1
    Complex const entry_rev = leg(chi_at(0), z2);  // reverse entry at atom 2
    double num = 0.0;
    double den = 0.0;
    for (int ix = -nx; ix <= nx; ++ix) {
        double const x1 = h * ix;
        for (int iy = -ny; iy <= ny; ++iy) {
            double const y2 = h * iy;
            double const wxy = gauss(x1, sx) * gauss(y2, sy);
            Complex const mid_d = leg(chi_at(ix), r);
            Complex const mid_r = leg(chi_at(-iy), r);
            Complex const exit = chi_at(ix - iy);
            Complex const pre_d = entry * mid_d * leg(exit, z2);
            Complex const pre_r = entry_rev * mid_r * leg(exit, z1);
            for (int j1 = -n1; j1 <= n1; ++j1) {
                double const s1 = -0.5 * x1 + hs1 * j1;
                double const t1 = x1 + s1;
                Complex const d1 = lorentz(laser - s1);
                Complex const r1 = lorentz(laser - y2 + t1);
                double const w1 = wxy * gauss(hs1 * j1, s1c);
                for (int j2 = -n2; j2 <= n2; ++j2) {
                    double const s2 = 0.5 * y2 + hs2 * j2;
                    double const t2 = y2 - s2;
                    double const w = w1 * gauss(hs2 * j2, s2c);
                    // Direct: atom 1 (in k) then atom 2 (in k'). Reverse: atom 2 (in k) then atom 1 (in -k').
                    Complex const ad = pre_d * d1 * lorentz(laser + x1 - t2);
                    Complex const ar = pre_r * lorentz(laser - s2) * r1;
                    num += w * (ar * std::conj(ad)).real();
                    den += w * std::norm(ad);
                }
            }
        }
    }
    return num / den;
}

struct Estimate {
    double value;
    double error;
};

Estimate monte_carlo_c2(TransportEngine const& engine, TwoAtomGeometry const& g, double ell, std::uint64_t samples,
                        std::uint64_t seed) {
    Vec3 const k{0, 0, 1};
    double const sp = std::sqrt(1.0 - g.cos_phi * g.cos_phi);
    Vec3 const kp{sp * std::cos(g.azimuth), sp * std::sin(g.azimuth), g.cos_phi};
    Vec3 const r1{0.0, 0.0, g.z1 * ell};
    Vec3 const r2 = r1 + (g.r * ell) * kp;
    double const laser = engine.settings().laser_detuning;
    auto const& dist = engine.settings().velocity;

    PhotonPathRecord path;
    path.laser_detuning = laser;
    path.entry_point = {0, 0, 0};
    path.entry_direction = k;
    path.events.resize(2);
    int const batches = 64;
    std::vector<double> num(batches, 0.0), den(batches, 0.0);
    for (std::uint64_t i = 0; i < samples; ++i) {
        RandomStream rng(seed, i);
        Vec3 const v1 = sample_velocity(dist, rng);
        Vec3 const v2 = sample_velocity(dist, rng);
        path.events[0] = {r1, v1, k, laser, 1.0};
        path.events[1] = {r2, v2, kp, laser + doppler_shift(k, kp, v1), 1.0};
        Complex const ad = engine.direct_amplitude(path, -k);
        Complex const ar = engine.reverse_amplitude(path, -k);
        auto const b = static_cast<std::size_t>(i * batches / samples);
        num[b] += (ar * std::conj(ad)).real();
        den[b] += std::norm(ad);
    }
    double tn = 0, td = 0;
    for (int b = 0; b < batches; ++b) {
        tn += num[b];
        td += den[b];
    }
    double const ratio = tn / td;
    double ss = 0.0;
    for (int b = 0; b < batches; ++b) ss += (num[b] - ratio * den[b]) * (num[b] - ratio * den[b]);
    return {ratio, std::sqrt(batches / (batches - 1.0) * ss) / td};
}

Outcome double_scattering() {
    std::vector<TwoAtomGeometry> const geometries{
        {0.5, 1.0, 0.3, 0.4}, {1.2, 0.4, -0.6, 2.0}, {0.2, 2.0, 0.1, -1.0}, {2.0, 1.5, 0.8, 3.0}};
    std::ostringstream os;
    bool ok = true;
    int worst_id = 0;
    double worst_z = 0.0;
    int id = 0;
    for (double kv : {0.05, 0.2}) {
        for (double delta : {0.0, 5.0}) {
            TransportEngine const engine(slab(VelocityDistribution::gaussian(kv), delta, 2));
            double const ell0 = engine.settings().geometry.ell0();
            double const ell = engine.ell(delta);
            for (auto const& g : geometries) {
                double const oracle = quadrature_c2(g, kv, delta, ell0, ell);
                auto const mc = monte_carlo_c2(engine, g, ell, 400000, 500 + id);
                double const z = std::abs(mc.value - oracle) / mc.error;
                if (z > worst_z) {
                    worst_z = z;
                    worst_id = id;
                }
                ok = ok && z <= 3.0;
                os << "kv=" << kv << " d=" << delta << " g" << (id % 4) << ": " << fmt("%.4f", mc.value) << "+-"
                   << fmt("%.4f", mc.error) << " vs " << fmt("%.4f", oracle) << "; ";
                ++id;
            }
        }
    }
    os << "worst " << fmt("%.2f", worst_z) << " sigma (case " << worst_id << ")";
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 6./7. Closed-form budget.

Outcome cold_point() {
    double const x = 0.065 / 4.6;
    auto const b = coherence_scales(x);
    std::ostringstream os;
    os << "kv/Gamma = " << fmt("%.5f", x) << ", L_phi/ell = " << fmt("%.4f", b.l_phi) << ", b_max = "
       << fmt("%.4f", b.b_max) << " (floor " << b.b_max_floor << "), N_phi = " << fmt("%.2f", b.n_phi);
    return {b.l_phi >= 3.5 && b.l_phi <= 4.0 && b.b_max_floor == 4, os.str()};
}

Outcome identities() {
    double worst_l = 0.0;
    double worst_c = 0.0;
    for (int i = 0; i <= 300; ++i) {
        double const x = std::pow(10.0, -4.0 + 3.0 * i / 300.0);
        auto const b = coherence_scales(x);
        double const diffusive = std::sqrt(b.diffusion * b.tau_phi);
        worst_l = std::max(worst_l, std::abs(b.l_phi - diffusive) / diffusive);
        double const n = critical_order(x);
        worst_c = std::max(worst_c, std::abs(std::exp(-n * n * n * x * x / 12.0) - std::exp(-1.0)));
    }
    std::ostringstream os;
    os << "max rel |L_phi - sqrt(D tau_phi)| = " << worst_l << ", max |c(N_phi) - 1/e| = " << worst_c;
    return {worst_l <= 1e-12 && worst_c <= 1e-12, os.str()};
}

// ---------------------------------------------------------------------------
// 8. Frequency random walk.

Outcome frequency_walk() {
    double const kv = 0.1;
    auto const stats = frequency_walk_stats(VelocityDistribution::gaussian(kv), 25, 100000, 8);
    bool ok = true;
    std::ostringstream os;
    for (int n : {4, 9, 25}) {
        double const measured = stats[static_cast<std::size_t>(n - 1)].stddev;
        double const expected = std::sqrt(2.0 * n) * kv;
        double const rel = std::abs(measured / expected - 1.0);
        ok = ok && rel <= 0.05;
        os << "N=" << n << ": " << fmt("%.4f", measured) << " vs " << fmt("%.4f", expected) << " ("
           << fmt("%.1f", 100 * rel) << "%); ";
    }
    return {ok, os.str()};
}

// ---------------------------------------------------------------------------
// 9. Double-scattering cone width.
//
// For a semi-infinite slab at normal incidence the double-scattering cone is
// I(q) / I(0) with I(q) = int_0^1 dc / sqrt((1 + c)^2 + q^2 (1 - c^2)),
// q = k ell sin(theta), I(0) = ln 2.

double cone_profile(double q) {
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate([q](double c) { return 1.0 / std::sqrt((1 + c) * (1 + c) + q * q * (1 - c * c)); }, 0.0,
                        1.0) /
           std::log(2.0);
}

Outcome angular_width() {
    double const k_ell = 1000.0;
    std::uintmax_t iters = 100;
    auto const bracket = boost::math::tools::bisect([](double q) { return cone_profile(q) - 0.5; }, 0.1, 50.0,
                                                    boost::math::tools::eps_tolerance<double>(40), iters);
    double const q_half = 0.5 * (bracket.first + bracket.second);
    double const oracle = std::asin(q_half / k_ell);

    TransportSettings t;
    t.max_order = 2;
    auto est = budget(400000, 9);
    est.angular_order_min = 2;
    est.angular_order_max = 2;
    est.theta.clear();
    for (int i = 0; i <= 80; ++i) est.theta.push_back(1e-4 * i);
    auto const mc = contrast_per_order(t, est);
    double const hw = mc.angular_half_width;
    double const ratio = hw * k_ell;
    bool const within_factor = ratio >= 0.5 && ratio <= 2.0;
    bool const matches_oracle = std::abs(hw / oracle - 1.0) <= 0.05;
    std::ostringstream os;
    os << "MC half width = " << fmt("%.3f", ratio) << "/k ell, quadrature oracle = " << fmt("%.3f", oracle * k_ell)
       << "/k ell (" << (matches_oracle ? "agree within 5%" : "DISAGREE") << "); factor-2 band [0.5, 2] "
       << (within_factor ? "met" : "NOT met");
    return {within_factor && matches_oracle, os.str()};
}

// ---------------------------------------------------------------------------
// 10. Enhancement factor against velocity.

Outcome enhancement_shape() {
    std::vector<double> const velocities{0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
    auto run = [](VelocityKind kind, double v, std::uint64_t seed) {
        RunConfig cfg;
        cfg.geometry = GeometryKind::Sphere;
        cfg.b = 13.0;
        cfg.velocity = v == 0.0 ? VelocityKind::Static : kind;
        cfg.kv_over_gamma = v;
        cfg.photons = 100000;
        cfg.seed = seed;
        return run_single(cfg).enhancement;
    };
    std::ostringstream os;
    bool decreasing = true;
    std::vector<Measurement> gauss, lor;
    for (std::size_t i = 0; i < velocities.size(); ++i) {
        gauss.push_back(run(VelocityKind::Gaussian, velocities[i], derive_seed(1010, i)));
        lor.push_back(run(VelocityKind::LorentzLike, velocities[i], derive_seed(2020, i)));
    }
    os << "gaussian:";
    for (std::size_t i = 0; i < velocities.size(); ++i) {
        os << ' ' << fmt("%.4f", gauss[i].value);
        if (i > 0) decreasing = decreasing && gauss[i].value < gauss[i - 1].value;
    }
    os << "; lorentz:";
    for (std::size_t i = 0; i < velocities.size(); ++i) {
        os << ' ' << fmt("%.4f", lor[i].value);
        if (i > 0) decreasing = decreasing && lor[i].value < lor[i - 1].value;
    }
    double const drop = gauss.front().value - gauss.back().value;
    bool const significant = drop > 3.0 * std::hypot(gauss.front().std_error, gauss.back().std_error);
    // Lorentz-like input decays faster at the smallest nonzero velocity.
    double const gap = gauss[1].value - lor[1].value;
    double const gap_sigma = std::hypot(gauss[1].std_error, lor[1].std_error);
    bool const faster = gap > 3.0 * gap_sigma;
    os << "; gaussian - lorentz at v=0.01: " << fmt("%.4f", gap) << " (" << fmt("%.1f", gap / gap_sigma)
       << " sigma)";
    return {decreasing && significant && faster, os.str()};
}

// ---------------------------------------------------------------------------
// 11. Reproducibility.

Outcome reproducibility() {
    RunConfig cfg;
    cfg.velocity = VelocityKind::Gaussian;
    cfg.kv_over_gamma = 0.02;
    cfg.photons = 50000;
    cfg.seed = 77;
    cfg.theta = {0.0, 5e-4, 1e-3};
    auto const one = run_single(cfg);
    auto const again = run_single(cfg);
    cfg.workers = 8;
    auto const eight = run_single(cfg);
    double worst = 0.0;
    for (std::size_t n = 0; n < one.estimate.orders.size(); ++n) {
        auto const& a = one.estimate.orders[n];
        auto const& b = eight.estimate.orders[n];
        if (!a.present) continue;
        worst = std::max(worst, std::abs(a.contrast - b.contrast) / std::abs(a.contrast));
        worst = std::max(worst, std::abs(a.weight - b.weight) / a.weight);
    }
    bool const identical_csv = orders_csv(one) == orders_csv(again) && angular_csv(one) == angular_csv(again);
    std::ostringstream os;
    os << "max relative difference 1 vs 8 workers = " << worst << ", single-threaded CSV rerun "
       << (identical_csv ? "bit-identical" : "DIFFERS");
    return {worst <= 1e-12 && identical_csv, os.str()};
}

}  // namespace

int main() {
    std::printf("cbs acceptance suite (%s)\n", version_string().c_str());
    criterion(1, "static atoms interfere perfectly", static_perfection);
    criterion(2, "low-velocity contrast follows exp(-N^3 (kv)^2 / 12)", decay_formula);
    criterion(3, "low-velocity contrast is detuning independent", detuning_independence);
    criterion(4, "off-resonant contrast restoration at large velocity", restoration);
    criterion(5, "double scattering matches velocity quadrature", double_scattering);
    criterion(6, "coherence budget at the cold-cloud point", cold_point);
    criterion(7, "coherence-length and critical-order identities", identities);
    criterion(8, "Doppler frequency random walk", frequency_walk);
    criterion(9, "double-scattering cone width", angular_width);
    criterion(10, "enhancement factor decreases with velocity", enhancement_shape);
    criterion(11, "reproducibility across worker counts", reproducibility);
    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
