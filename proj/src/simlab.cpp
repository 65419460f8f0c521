#include "scoredec/simlab.hpp"

#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/tools/roots.hpp>

#include "scoredec/errors.hpp"

namespace scoredec {

namespace {

const boost::math::normal kStdNormal;

using V4 = Eigen::Vector4d;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct CheckParts {
    double mcb;
    double dsc;
    double unc;
};

// Population check-loss components of the forecast c0 + V'c + z_alpha.
CheckParts check_components(const V4& gamma, double c0, const V4& c, double varsigma, double alpha, bool& constant) {
    const double z = boost::math::quantile(kStdNormal, alpha);
    const double phiz = boost::math::pdf(kStdNormal, z);
    const double gg = gamma.squaredNorm();
    const double cc = c.squaredNorm();
    const double cg = c.dot(gamma);
    const double sy = std::sqrt(varsigma * gg + 1.0);
    constant = !(cc > 0.0);
    const double s1x = constant ? sy : std::sqrt(std::max(sy * sy - varsigma * cg * cg / cc, 0.0));
    const double m = -(c0 + z);
    const double s = std::sqrt(1.0 + varsigma * (gg + cc - 2.0 * cg));
    const double kappa = m / s;
    CheckParts p;
    p.mcb = m * (boost::math::cdf(kStdNormal, kappa) + alpha - 1.0) + s * boost::math::pdf(kStdNormal, kappa) -
            s1x * phiz;
    p.dsc = phiz * (sy - s1x);
    p.unc = sy * phiz;
    return p;
}

double xi0_objective(double xi0, double k, double alpha, double varsigma) {
    const V4 gamma{0.0, 0.0, 0.0, k};
    const V4 delta{0.25, 0.0, 0.25, 0.0};
    const V4 xi{0.0, k / 2.0 + 0.25, 0.0, k / 2.0 + 0.25};
    bool c1 = false, c2 = false;
    const double m1 = check_components(gamma, 0.5, delta, varsigma, alpha, c1).mcb;
    const double m2 = check_components(gamma, xi0, xi, varsigma, alpha, c2).mcb;
    return m2 - m1;
}

}  // namespace

void SimScenario::validate() const {
    if (!(beta > -1.0 && beta < 1.0)) throw InputError("AR coefficient must lie in (-1, 1)");
    if (delta(1) != 0.0) throw InputError("forecaster 1 has no access to L");
    if (xi(0) != 0.0) throw InputError("forecaster 2 has no access to K");
    if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) throw InputError("quantile level must lie in (0, 1)");
    if (!(k >= 0.0)) throw InputError("misspecification parameter k must be non-negative");
}

SimScenario table3(int row, char variant, double k, double beta) {
    if (variant != 'a' && variant != 'b') throw InputError("variant must be 'a' or 'b'");
    const bool a = variant == 'a';
    const double q = 0.25;
    const double h = k / 2.0 + q;
    const double r2 = std::sqrt(2.0);
    SimScenario s;
    s.beta = beta;
    s.k = k;
    s.table_id = "3." + std::to_string(row) + variant;
    const V4 g_lm{0.0, q, q, 0.0};
    const V4 g_klm{q, q, q, 0.0};
    const V4 g_n{0.0, 0.0, 0.0, k};
    switch (row) {
        case 1:
            s.gamma = a ? g_lm : g_klm;
            s.delta = a ? V4{0.0, 0.0, k / r2 + q, 0.0} : V4{h, 0.0, h, 0.0};
            s.xi = V4{0.0, h, h, 0.0};
            break;
        case 2:
            s.gamma = a ? g_lm : g_klm;
            s.delta = a ? V4{0.0, 0.0, q, 0.0} : V4{q, 0.0, q, 0.0};
            s.xi = V4{0.0, h, h, 0.0};
            break;
        case 3:
            s.gamma = a ? g_lm : g_klm;
            s.delta = a ? V4{0.0, 0.0, k + q, 0.0} : V4{k / r2 + q, 0.0, k / r2 + q, 0.0};
            s.xi = V4{0.0, h, h, 0.0};
            break;
        case 4: {
            s.gamma = g_n;
            const double d = a ? k / 2.0 + 1.0 / (4.0 * r2) : h;
            s.delta = V4{d, 0.0, 0.0, d};
            s.xi = V4{0.0, h, 0.0, h};
            break;
        }
        case 5:
            s.gamma = g_n;
            s.delta = a ? V4{0.0, 0.0, q, 0.0} : V4{q, 0.0, q, 0.0};
            s.xi = V4{0.0, h, 0.0, h};
            break;
        case 6:
            s.gamma = g_n;
            s.delta0 = a ? 0.0 : 1.0 / std::sqrt(15.0);
            s.delta = V4{0.0, 0.0, 0.0, k + q};
            s.xi = V4{0.0, h, 0.0, h};
            break;
        default: throw InputError("mean design rows are 1-6");
    }
    s.validate();
    return s;
}

SimScenario table4(int row, double k, double alpha, double beta) {
    const double q = 0.25;
    const double h = k / 2.0 + q;
    SimScenario s;
    s.beta = beta;
    s.k = k;
    s.alpha = alpha;
    s.table_id = "4." + std::to_string(row);
    switch (row) {
        case 1:
            s.gamma = V4{q, q, q, 0.0};
            s.delta = V4{h, 0.0, h, 0.0};
            s.xi = V4{0.0, h, h, 0.0};
            break;
        case 2:
            s.gamma = V4{q, q, q, 0.0};
            s.delta = V4{q, 0.0, q, 0.0};
            s.xi = V4{0.0, h, h, 0.0};
            break;
        case 4:
            s.gamma = V4{0.0, 0.0, 0.0, k};
            s.delta = V4{h, 0.0, 0.0, h};
            s.xi = V4{0.0, h, 0.0, h};
            break;
        case 5:
            s.gamma = V4{0.0, 0.0, 0.0, k};
            s.delta0 = 0.5;
            s.delta = V4{q, 0.0, q, 0.0};
            s.xi = V4{0.0, h, 0.0, h};
            s.xi0 = solve_xi0(k, alpha, beta);
            break;
        default: throw InputError("quantile design rows are 1, 2, 4 and 5");
    }
    s.validate();
    return s;
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

SimPaths gen_paths(const SimScenario& s, int T, std::uint64_t seed, std::uint64_t stream) {
    s.validate();
    if (T < 1) throw InputError("path length must be positive");
    std::mt19937_64 rng(substream_seed(seed, stream));
    std::normal_distribution<double> nd(0.0, 1.0);
    const double sd0 = std::sqrt(s.varsigma());
    const double za = s.alpha ? boost::math::quantile(kStdNormal, *s.alpha) : 0.0;

    SimPaths p;
    p.y.resize(T);
    p.x1.resize(T);
    p.x2.resize(T);
    p.predictors.resize(T, 4);
    V4 v;
    for (int j = 0; j < 4; ++j) v(j) = sd0 * nd(rng);
    for (int t = 0; t < T; ++t) {
        if (t > 0)
            for (int j = 0; j < 4; ++j) v(j) = s.beta * v(j) + nd(rng);
        const double eps = nd(rng);
        p.predictors.row(t) = v.transpose();
        p.y(t) = v.dot(s.gamma) + eps;
        p.x1(t) = s.delta0 + v.dot(s.delta) + za;
        p.x2(t) = s.xi0 + v.dot(s.xi) + za;
    }
    return p;
}

PopulationOracle population_se(const SimScenario& s) {
    s.validate();
    const double vs = s.varsigma();
    PopulationOracle o;
    o.unc = vs * s.gamma.squaredNorm() + 1.0;
    auto one = [&](double c0, const V4& c, double& mcb, double& dsc, const char* who) {
        const double cc = c.squaredNorm();
        if (!(cc > 0.0)) {
            mcb = c0 * c0;
            dsc = 0.0;
            o.notes.push_back(std::string(who) + ": constant forecast, DSC = 0 by convention");
            return;
        }
        const double cg = c.dot(s.gamma);
        mcb = c0 * c0 + vs * (cc - cg) * (cc - cg) / cc;
        dsc = vs * cg * cg / cc;
    };
    one(s.delta0, s.delta, o.mcb1, o.dsc1, "forecaster 1");
    one(s.xi0, s.xi, o.mcb2, o.dsc2, "forecaster 2");
    return o;
}

PopulationOracle population_check(const SimScenario& s) {
    s.validate();
    if (!s.alpha) throw InputError("quantile oracle needs a quantile level");
    const double vs = s.varsigma();
    PopulationOracle o;
    bool c1 = false, c2 = false;
    const CheckParts p1 = check_components(s.gamma, s.delta0, s.delta, vs, *s.alpha, c1);
    const CheckParts p2 = check_components(s.gamma, s.xi0, s.xi, vs, *s.alpha, c2);
    o.mcb1 = p1.mcb;
    o.dsc1 = p1.dsc;
    o.mcb2 = p2.mcb;
    o.dsc2 = p2.dsc;
    o.unc = p1.unc;
    if (c1) o.notes.emplace_back("forecaster 1: constant forecast, DSC = 0 by convention");
    if (c2) o.notes.emplace_back("forecaster 2: constant forecast, DSC = 0 by convention");
    return o;
}

double solve_xi0(double k, double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("quantile level must lie in (0, 1)");
    if (!(beta > -1.0 && beta < 1.0)) throw InputError("AR coefficient must lie in (-1, 1)");
    const double vs = 1.0 / (1.0 - beta * beta);
    const double z = boost::math::quantile(kStdNormal, alpha);
    const double s1 = std::sqrt(1.0 + vs * (k * k + 0.125));
    const double s2 = std::sqrt(1.0 + vs * (k * k / 2.0 + 0.125));
    // MCB2 is convex in xi0 with its minimum at z (s2 - 1)
    const double xmin = z * (s2 - 1.0);
    const bool right = 0.5 >= z * (s1 - 1.0);
    auto f = [&](double x) { return xi0_objective(x, k, alpha, vs); };

    for (double edge : {5.0, 10.0}) {
        double lo = right ? xmin : -edge;
        double hi = right ? edge : xmin;
        const double flo = f(lo);
        const double fhi = f(hi);
        if (flo == 0.0) return lo;
        if (fhi == 0.0) return hi;
        if ((flo < 0.0) == (fhi < 0.0)) continue;
        boost::uintmax_t iters = 300;
        const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                         boost::math::tools::eps_tolerance<double>(53), iters);
        const double a = r.first;
        const double b = r.second;
        return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
    }
    throw EstimationError("xi0 root not bracketed on [-10, 10]");
}

std::string to_string(StudyTest t) {
    switch (t) {
        case StudyTest::EqualMcb: return "equal_mcb";
        case StudyTest::EqualDsc: return "equal_dsc";
        case StudyTest::DM: return "dm";
    }
    return "?";
}

std::vector<StudyRow> run_rejection_study(const StudyConfig& cfg) {
    if (cfg.reps < 100) throw InputError("a rejection study needs at least 100 replications");
    if (cfg.T < 20) throw InputError("a rejection study needs T >= 20");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw InputError("significance level must lie in (0, 1)");
    if (cfg.tests.empty()) throw InputError("no tests selected");
    const int nthreads = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    const size_t ntest = cfg.tests.size();

    std::vector<StudyRow> rows;
    for (size_t si = 0; si < cfg.scenarios.size(); ++si) {
        const SimScenario& sc = cfg.scenarios[si];
        const ScoringSpec spec = sc.alpha ? ScoringSpec::check_loss(*sc.alpha) : ScoringSpec::squared_error();
        // reject[r * ntest + j]: 1 reject, 0 accept, -1 failed replication
        std::vector<signed char> reject(static_cast<size_t>(cfg.reps) * ntest, 0);
        std::atomic<int> next{0};
        auto worker = [&]() {
            for (int r = next++; r < cfg.reps; r = next++) {
                const std::uint64_t stream = (static_cast<std::uint64_t>(si) << 32) | static_cast<std::uint64_t>(r);
                signed char* out = &reject[static_cast<size_t>(r) * ntest];
                try {
                    const SimPaths p = gen_paths(sc, cfg.T, cfg.seed, stream);
                    const Decomposition d1 = decompose(spec, p.x1, p.y);
                    const Decomposition d2 = decompose(spec, p.x2, p.y);
                    const LongRunCov om = omega_hat(d1, d2, cfg.hac);
                    for (size_t j = 0; j < ntest; ++j) {
                        double pv = 1.0;
                        switch (cfg.tests[j]) {
                            case StudyTest::EqualMcb: pv = test_equal_mcb(spec, d1, d2, p.y, om, cfg.hac).p_value; break;
                            case StudyTest::EqualDsc: pv = test_equal_dsc(spec, d1, d2, p.y, om, cfg.hac).p_value; break;
                            case StudyTest::DM: pv = gaussian_component_test(d1, d2, kSelectDm, om).p_value; break;
                        }
                        out[j] = pv < cfg.level ? 1 : 0;
                    }
                } catch (const std::exception&) {
                    for (size_t j = 0; j < ntest; ++j) out[j] = -1;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();

        for (size_t j = 0; j < ntest; ++j) {
            int valid = 0, rej = 0, failed = 0;
            for (int r = 0; r < cfg.reps; ++r) {
                const signed char v = reject[static_cast<size_t>(r) * ntest + j];
                if (v < 0) {
                    ++failed;
                } else {
                    ++valid;
                    rej += v;
                }
            }
            if (failed * 100 >= cfg.reps && failed > 0)
                throw EstimationError("rejection study aborted: " + std::to_string(failed) +
                                      " failed replications in scenario " + sc.table_id);
            StudyRow row;
            row.scenario = sc.table_id;
            row.k = sc.k;
            row.alpha = sc.alpha;
            row.test = to_string(cfg.tests[j]);
            row.T = cfg.T;
            row.reps = valid;
            row.failures = failed;
            row.rate = valid > 0 ? static_cast<double>(rej) / valid : 0.0;
            row.mc_se = valid > 0 ? std::sqrt(row.rate * (1.0 - row.rate) / valid) : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string study_csv(const std::vector<StudyRow>& rows) {
    std::ostringstream os;
    os << "scenario,k,alpha,test,T,reps,rate,mc_se\n";
    os << std::setprecision(10);
    for (const auto& r : rows) {
        os << r.scenario << ',' << r.k << ',';
        if (r.alpha) {
            os << *r.alpha;
        } else {
            os << "NA";
        }
        os << ',' << r.test << ',' << r.T << ',' << r.reps << ',' << r.rate << ',' << r.mc_se << '\n';
    }
    return os.str();
}

}  // namespace scoredec
