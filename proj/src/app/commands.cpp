// Copyright (c) agcv contributors.
// SPDX-License-Identifier: Apache-2.0
#include "agcv/app/commands.hpp"

#include <ostream>
#include <stdexcept>

#include "agcv/app/examples.hpp"
#include "agcv/app/model_file.hpp"
#include "agcv/app/simulate.hpp"
#include "agcv/app/sweep.hpp"
#include "agcv/contracts/checker.hpp"

namespace agcv::app {

std::filesystem::path sibling(const std::filesystem::path& model, const std::string& ext) {
    std::filesystem::path p = model;
    p.replace_extension(ext);
    return p;
}

namespace {

void report_error(std::ostream& err, const std::filesystem::path& file, const std::exception& e) {
    if (const auto* kv = dynamic_cast<const KvError*>(&e)) {
        err << file.string() << ":" << kv->line() << ":" << kv->column() << ": error: " << kv->what() << "\n";
    } else {
        err << file.string() << ": error: " << e.what() << "\n";
    }
}

// model plus the optional --config overlay
ModelFile load_with_overrides(const std::filesystem::path& model, const GlobalOptions& g, std::ostream& err,
                              bool& ok) {
    ok = false;
    ModelFile m;
    try {
        m = load_model(model);
    } catch (const std::exception& e) {
        report_error(err, model, e);
        return m;
    }
    if (g.config) {
        try {
            const KvDocument doc = KvDocument::parse(read_file(*g.config));
            for (const auto& sec : doc.sections()) {
                if (sec.name.empty() || sec.name == "config") {
                    apply_config(sec, m.config, m.simulation);
                } else {
                    throw KvError(sec.line, 1, "unknown section [" + sec.name + "] in config file");
                }
            }
            m.config.validate();
        } catch (const std::exception& e) {
            report_error(err, *g.config, e);
            return m;
        }
    }
    ok = true;
    return m;
}

std::string format_step(const TraceRecord& r) {
    std::string line = "step " + std::to_string(r.step) + " node " + r.node + " " + r.operation + " " + r.status;
    for (const auto& [k, v] : r.values) {
        line += " " + k + "=" + kv_number(v);
    }
    if (!r.note.empty()) {
        line += " (" + r.note + ")";
    }
    return line;
}

} // namespace

int cmd_verify(const std::filesystem::path& model, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    bool ok = false;
    ModelFile m = load_with_overrides(model, g, err, ok);
    if (!ok) {
        return kExitUsage;
    }
    Certificate cert;
    try {
        cert = run(m.system, m.config, [&](const TraceRecord& r) { out << format_step(r) << "\n" << std::flush; });
    } catch (const std::exception& e) {
        report_error(err, model, e);
        return kExitUsage;
    }
    cert.model_hash = m.hash;
    try {
        write_file_atomic(sibling(model, ".cert"), write_certificate(cert, m.system.variables));
        write_file_atomic(sibling(model, ".trace"), write_trace(cert.trace));
    } catch (const std::exception& e) {
        report_error(err, model, e);
        return kExitUsage;
    }
    out << "verdict " << (cert.verdict ? "True" : "False") << " algorithm " << cert.algorithm << " iterations "
        << cert.iterations << " contracts " << cert.contracts.size();
    if (!cert.reason.empty()) {
        out << " reason: " << cert.reason;
    }
    out << "\n";
    if (g.verbose) {
        out << "certificate " << sibling(model, ".cert").string() << "\ntrace " << sibling(model, ".trace").string()
            << "\n";
    }
    return cert.verdict ? kExitTrue : kExitFalse;
}

int cmd_check(const std::filesystem::path& certificate, const std::filesystem::path& model, const GlobalOptions& g,
              std::ostream& out, std::ostream& err) {
    bool ok = false;
    ModelFile m = load_with_overrides(model, g, err, ok);
    if (!ok) {
        return kExitUsage;
    }
    Certificate cert;
    try {
        cert = read_certificate(read_file(certificate), m.system.variables);
    } catch (const std::exception& e) {
        report_error(err, certificate, e);
        return kExitUsage;
    }
    if (cert.model_hash != m.hash) {
        err << certificate.string() << ": error: model hash mismatch (certificate " << cert.model_hash << ", model "
            << m.hash << ")\n";
        return kExitUsage;
    }
    CheckSettings settings;
    settings.seed = g.seed;
    settings.psd_tol = m.config.synthesis.extract.psd_tol;
    settings.residual_tol = m.config.synthesis.extract.residual_tol;
    CheckReport report;
    try {
        report = check_certificate(cert, m.system, settings);
    } catch (const std::exception& e) {
        report_error(err, certificate, e);
        return kExitUsage;
    }
    for (const auto& f : report.failures) {
        out << "FAIL " << f << "\n";
    }
    out << "checked " << report.checks << " conditions, " << report.failures.size() << " failures\n";
    return report.passed() ? kExitTrue : kExitCheckFailed;
}

int cmd_simulate(const std::filesystem::path& model, const SimulateOptions& o, const GlobalOptions& g,
                 std::ostream& out, std::ostream& err) {
    bool ok = false;
    ModelFile m = load_with_overrides(model, g, err, ok);
    if (!ok) {
        return kExitUsage;
    }
    SimulationOptions so;
    so.samples = o.samples.value_or(m.simulation.samples);
    so.horizon = o.horizon.value_or(m.simulation.horizon);
    so.sim_tol = m.simulation.sim_tol;
    so.seed = g.seed;
    if (so.samples < 0 || so.horizon < 0.0) {
        err << "error: samples and horizon must be non-negative\n";
        return kExitUsage;
    }
    std::map<SubsystemId, Contract> contracts;
    const std::filesystem::path cert_path = o.certificate.value_or(sibling(model, ".cert"));
    if (o.certificate || std::filesystem::exists(cert_path)) {
        try {
            const Certificate cert = read_certificate(read_file(cert_path), m.system.variables);
            if (cert.model_hash != m.hash) {
                err << cert_path.string() << ": error: model hash mismatch\n";
                return kExitUsage;
            }
            contracts = cert.contracts;
        } catch (const std::exception& e) {
            report_error(err, cert_path, e);
            return kExitUsage;
        }
    }
    SimulationReport report;
    try {
        report = simulate(m.system, contracts, so);
    } catch (const std::exception& e) {
        report_error(err, model, e);
        return kExitUsage;
    }
    const std::filesystem::path base = o.output.value_or(model);
    try {
        write_file_atomic(sibling(base, ".sim"), write_report(report, m.system, so));
        write_file_atomic(sibling(base, ".csv"), write_plot_csv(report, m.system, contracts));
    } catch (const std::exception& e) {
        report_error(err, base, e);
        return kExitUsage;
    }
    double min_h = 0.0;
    bool any_h = false;
    for (const auto& tr : report.trajectories) {
        for (const auto& [id, h] : tr.min_barrier) {
            min_h = any_h ? std::min(min_h, h) : h;
            any_h = true;
        }
    }
    out << "trajectories " << report.trajectories.size() << " violations " << report.violations;
    if (any_h) {
        out << " min_barrier " << kv_number(min_h);
    }
    out << "\n";
    return kExitTrue;
}

int cmd_example(const std::string& name, int n, const std::optional<std::filesystem::path>& output,
                const GlobalOptions& /*g*/, std::ostream& out, std::ostream& err) {
    std::string text;
    try {
        text = example_model(name, n);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!output) {
        out << text;
        return kExitTrue;
    }
    try {
        write_file_atomic(*output, text);
    } catch (const std::exception& e) {
        report_error(err, *output, e);
        return kExitUsage;
    }
    return kExitTrue;
}

int cmd_sweep(const std::filesystem::path& model, const SweepOptions& o, const GlobalOptions& g, std::ostream& out,
              std::ostream& err) {
    bool ok = false;
    ModelFile m = load_with_overrides(model, g, err, ok);
    if (!ok) {
        return kExitUsage;
    }
    SweepParameter parameter{};
    std::vector<double> values;
    try {
        parameter = sweep_parameter_from_string(o.parameter);
        values = parse_range(o.range);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    const SubsystemId id = o.subsystem.value_or(m.system.subsystems.rbegin()->first);
    const auto it = m.system.subsystems.find(id);
    if (it == m.system.subsystems.end()) {
        err << "error: no subsystem " << id << "\n";
        return kExitUsage;
    }
    SweepResult result;
    try {
        result = sweep(it->second, parameter, values, m.config.synthesis, o.relative,
                       2.0 * m.config.synthesis.bisection_tol);
    } catch (const std::exception& e) {
        report_error(err, model, e);
        return kExitUsage;
    }
    const std::string csv = write_sweep_csv(result);
    if (o.output) {
        try {
            write_file_atomic(*o.output, csv);
        } catch (const std::exception& e) {
            report_error(err, *o.output, e);
            return kExitUsage;
        }
        if (g.verbose) {
            out << csv;
        }
    } else {
        out << csv;
    }
    return kExitTrue;
}

} // namespace agcv::app
