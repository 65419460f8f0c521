#include "scoredec/cli/commands.hpp"

#include <filesystem>
#include <fstream>
#include <limits>

#include "scoredec/errors.hpp"

namespace scoredec::cli {

namespace {

struct Inputs {
    Vector y;
    std::vector<Vector> x;
    Matrix extra;
};

Inputs load(const RunConfig& cfg, const CsvTable& data) {
    if (data.rows() == 0) throw InputError("input has no data rows");
    Inputs in;
    in.y = data.column(cfg.y_col);
    for (const auto& c : cfg.x_cols) in.x.push_back(data.column(c));
    if (!cfg.extra_cols.empty()) in.extra = data.columns(cfg.extra_cols);
    return in;
}

void absorb(Report& rep, const TestReport& t, const std::string& who) {
    if (t.degenerate) {
        rep.degenerate = true;
        rep.warnings.push_back(who + ": " + t.name + " degenerate");
    }
}

}  // namespace

Report cmd_decompose(const RunConfig& cfg, const CsvTable& data) {
    const Inputs in = load(cfg, data);
    const ScoringSpec spec = make_spec(cfg);
    const HacOptions hac = make_hac(cfg.hac_kernel, cfg.hac_bandwidth);
    Report rep;
    rep.command = "decompose";
    for (size_t i = 0; i < in.x.size(); ++i) {
        const std::string& name = cfg.x_cols[i];
        const Decomposition d = decompose(spec, in.x[i], in.y, in.extra);
        const McbSplit split = split_mcb(spec, in.x[i], in.y, d);
        const TestReport m0 = test_mcb_zero(spec, d, in.y, hac);
        const TestReport d0 = test_dsc_zero(spec, d, in.y, hac);
        absorb(rep, m0, name);
        absorb(rep, d0, name);
        for (const auto& n : d.notes) rep.warnings.push_back(name + ": " + n);
        for (const auto& n : split.notes) rep.warnings.push_back(name + ": " + n);
        Record r;
        r.add("model", name)
            .add("n", static_cast<long long>(d.size()))
            .add("S", d.s_bar)
            .add("MCB", d.mcb)
            .add("DSC", d.dsc)
            .add("UNC", d.unc)
            .add("uMCB", split.umcb)
            .add("cMCB", split.cmcb)
            .add("p_MCB0", m0.p_value)
            .add("p_DSC0", d0.p_value);
        rep.records.push_back(std::move(r));
        rep.plot.push_back({name, d.mcb, d.dsc, d.s_bar});
        rep.unc = d.unc;
    }
    return rep;
}

Report cmd_compare(const RunConfig& cfg, const CsvTable& data) {
    const Inputs in = load(cfg, data);
    const ScoringSpec spec = make_spec(cfg);
    const HacOptions hac = make_hac(cfg.hac_kernel, cfg.hac_bandwidth);
    Report rep;
    rep.command = "compare";
    std::vector<Decomposition> ds;
    for (const auto& x : in.x) ds.push_back(decompose(spec, x, in.y, in.extra));
    for (size_t i = 0; i < ds.size(); ++i) {
        for (size_t j = i + 1; j < ds.size(); ++j) {
            const std::string who = cfg.x_cols[i] + " vs " + cfg.x_cols[j];
            const LongRunCov om = omega_hat(ds[i], ds[j], hac);
            const TestReport dm = [&] {
                TestReport t = gaussian_component_test(ds[i], ds[j], kSelectDm, om);
                t.name = "DM";
                return t;
            }();
            const TestReport em = test_equal_mcb(spec, ds[i], ds[j], in.y, om, hac);
            const TestReport ed = test_equal_dsc(spec, ds[i], ds[j], in.y, om, hac);
            for (const auto* t : {&dm, &em, &ed}) absorb(rep, *t, who);
            Record r;
            r.add("model1", cfg.x_cols[i])
                .add("model2", cfg.x_cols[j])
                .add("dS", ds[i].s_bar - ds[j].s_bar)
                .add("dMCB", ds[i].mcb - ds[j].mcb)
                .add("dDSC", ds[i].dsc - ds[j].dsc)
                .add("p_DM", dm.p_value)
                .add("DM_stars", stars(dm.p_value))
                .add("p_MCB", em.p_value)
                .add("MCB_stars", stars(em.p_value))
                .add("p_DSC", ed.p_value)
                .add("DSC_stars", stars(ed.p_value));
            rep.records.push_back(std::move(r));
        }
    }
    return rep;
}

Report cmd_backtest(const RunConfig& cfg, const CsvTable& data) {
    const Inputs in = load(cfg, data);
    const HacOptions hac = make_hac(cfg.hac_kernel, cfg.hac_bandwidth);
    const BacktestCovariance cov = parse_backtest_cov(cfg.backtest_cov);
    Report rep;
    rep.command = "backtest";
    for (size_t i = 0; i < in.x.size(); ++i) {
        const std::string& name = cfg.x_cols[i];
        const Vector& x = in.x[i];
        const HitSeries h = make_hits(x, in.y, cfg.alpha);
        // a test that cannot be estimated (e.g. VQR on a constant forecast) is reported as NA
        auto guarded = [&](const char* label, auto&& fn) {
            try {
                return TestReport(fn());
            } catch (const EstimationError& e) {
                TestReport t;
                t.name = label;
                t.p_value = std::numeric_limits<double>::quiet_NaN();
                rep.warnings.push_back(name + ": " + label + " not estimable: " + e.what());
                return t;
            }
        };
        const TestReport uc = guarded("UC", [&] { return regression_backtest(h, RegressionBacktest::UC, std::nullopt, cfg.lags, cov); });
        const TestReport cc = guarded("CC", [&] { return regression_backtest(h, RegressionBacktest::CC, std::nullopt, cfg.lags, cov); });
        const TestReport dq = guarded("DQ", [&] { return regression_backtest(h, RegressionBacktest::DQ, std::nullopt, cfg.lags, cov); });
        const TestReport dqx = guarded("DQX", [&] { return regression_backtest(h, RegressionBacktest::DQX, x, cfg.lags, cov); });
        const TestReport nz = guarded("NZ", [&] { return nz_test(h, x, hac); });
        const TestReport vqr = guarded("VQR", [&] { return vqr_backtest(x, in.y, cfg.alpha, hac); });
        const BaselResult basel = basel_traffic_light(static_cast<int>(x.size()), cfg.alpha, h.n_hits);
        for (const auto* t : {&uc, &cc, &dq, &dqx, &nz, &vqr}) {
            absorb(rep, *t, name);
            for (const auto& n : t->notes)
                if (n.find("Powell") == std::string::npos) rep.warnings.push_back(name + ": " + t->name + ": " + n);
        }
        Record r;
        r.add("model", name)
            .add("n", static_cast<long long>(x.size()))
            .add("hits", static_cast<long long>(h.n_hits))
            .add("hit_freq", h.hit_frequency())
            .add("p_UC", uc.p_value)
            .add("p_Basel", basel.p_value)
            .add("Basel_zone", to_string(basel.zone))
            .add("p_CC", cc.p_value)
            .add("p_NZ", nz.p_value)
            .add("p_VQR", vqr.p_value)
            .add("p_DQ", dq.p_value)
            .add("p_DQX", dqx.p_value);
        rep.records.push_back(std::move(r));
    }
    return rep;
}

Report cmd_diagnose(const RunConfig& cfg, const CsvTable& data) {
    const Inputs in = load(cfg, data);
    const ScoringSpec spec = make_spec(cfg);
    Report rep;
    rep.command = "diagnose";
    for (size_t i = 0; i < in.x.size(); ++i) {
        const Decomposition d = decompose(spec, in.x[i], in.y, in.extra);
        for (Eigen::Index t = 0; t < in.y.size(); ++t) {
            const double fit = d.fit.fitted(t);
            // raw residuals for mean fits, identification values for quantiles
            const double res = spec.functional == Functional::Mean ? in.y(t) - fit : identification(spec, fit, in.y(t));
            Record r;
            r.add("model", cfg.x_cols[i])
                .add("t", static_cast<long long>(t + 1))
                .add("forecast", in.x[i](t))
                .add("recalibrated", fit)
                .add("residual", res);
            rep.records.push_back(std::move(r));
        }
    }
    return rep;
}

Report cmd_simulate(const RunConfig& cfg) {
    StudyConfig sc;
    for (const auto& id : cfg.scenarios)
        for (double k : cfg.k_grid) sc.scenarios.push_back(parse_scenario(id, k, cfg.alpha));
    sc.T = cfg.T;
    sc.reps = cfg.reps;
    sc.level = cfg.level;
    sc.seed = cfg.seed;
    sc.threads = cfg.threads;
    sc.hac = make_hac(cfg.hac_kernel, cfg.hac_bandwidth);
    Report rep;
    rep.command = "simulate";
    for (const auto& row : run_rejection_study(sc)) {
        if (row.failures > 0)
            rep.warnings.push_back(row.scenario + " k=" + std::to_string(row.k) + ": " + std::to_string(row.failures) +
                                   " failed replications excluded");
        Record r;
        r.add("scenario", row.scenario)
            .add("k", row.k)
            .add("alpha", row.alpha ? Value(*row.alpha) : Value(std::string("NA")))
            .add("test", row.test)
            .add("T", static_cast<long long>(row.T))
            .add("reps", static_cast<long long>(row.reps))
            .add("rate", row.rate)
            .add("mc_se", row.mc_se);
        rep.records.push_back(std::move(r));
    }
    return rep;
}

Report cmd_oracle(const RunConfig& cfg) {
    Report rep;
    rep.command = "oracle";
    for (const auto& id : cfg.scenarios) {
        for (double k : cfg.k_grid) {
            const SimScenario s = parse_scenario(id, k, cfg.alpha);
            const PopulationOracle o = s.alpha ? population_check(s) : population_se(s);
            for (const auto& n : o.notes) rep.warnings.push_back(s.table_id + ": " + n);
            Record r;
            r.add("scenario", s.table_id)
                .add("k", k)
                .add("alpha", s.alpha ? Value(*s.alpha) : Value(std::string("NA")))
                .add("MCB1", o.mcb1)
                .add("DSC1", o.dsc1)
                .add("MCB2", o.mcb2)
                .add("DSC2", o.dsc2)
                .add("UNC", o.unc)
                .add("S1", o.mcb1 - o.dsc1 + o.unc)
                .add("S2", o.mcb2 - o.dsc2 + o.unc)
                .add("xi0", s.xi0);
            rep.records.push_back(std::move(r));
        }
    }
    return rep;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        validate(cfg);
        Report rep;
        if (cfg.command == "simulate") {
            rep = cmd_simulate(cfg);
        } else if (cfg.command == "oracle") {
            rep = cmd_oracle(cfg);
        } else {
            const CsvTable data = CsvTable::read_file(cfg.input);
            if (cfg.command == "decompose") rep = cmd_decompose(cfg, data);
            else if (cfg.command == "compare") rep = cmd_compare(cfg, data);
            else if (cfg.command == "backtest") rep = cmd_backtest(cfg, data);
            else rep = cmd_diagnose(cfg, data);
        }

        if (cfg.out.empty()) {
            render(rep, cfg.format, out);
        } else {
            std::filesystem::create_directories(cfg.out);
            const auto path = std::filesystem::path(cfg.out) / (rep.command + "." + extension(cfg.format));
            std::ofstream f(path);
            if (!f) throw InputError("cannot write " + path.string());
            render(rep, cfg.format, f);
        }
        if (!cfg.plot.empty()) {
            if (cfg.command != "decompose") {
                rep.warnings.emplace_back("--plot is only produced by decompose");
            } else {
                std::ofstream f(cfg.plot);
                if (!f) throw InputError("cannot write " + cfg.plot);
                f << mcb_dsc_svg(rep.plot, rep.unc);
            }
        }
        if (cfg.format != Format::Text || !cfg.out.empty())
            for (const auto& w : rep.warnings) err << "warning: " << w << '\n';
        if (rep.degenerate && cfg.strict) {
            err << "error: degenerate inference (--strict)\n";
            return kDegenerate;
        }
        return kOk;
    } catch (const InputError& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const UnsupportedOperation& e) {
        err << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const EstimationError& e) {
        err << "estimation error: " << e.what() << '\n';
        return kEstimationError;
    } catch (const std::exception& e) {
        err << "estimation error: " << e.what() << '\n';
        return kEstimationError;
    }
}

}  // namespace scoredec::cli
