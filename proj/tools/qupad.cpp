// Copyright 2026 The QuPAD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qupad: command-line driver for the device, training, LUT, calibration and report stages.
//
// Exit codes: 0 ok, 2 configuration or schema error, 3 numeric failure,
// 4 infeasible calibration, 1 anything else.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qupad/pipeline.hpp"
#include "qupad/qupad.hpp"

namespace fs = std::filesystem;
using namespace qupad;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInfeasible = 4;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

void add_common(CLI::App *cmd, Common &c, const std::string &out_help) {
    cmd->add_option("--config", c.config, "pipeline configuration JSON");
    cmd->add_option("--seed", c.seed, "global seed; overrides the configuration (default: config value, else 0)");
    cmd->add_option("--out", c.out, out_help);
}

PipelineConfig load(const Common &c) {
    PipelineConfig cfg;
    if (!c.config.empty()) {
        cfg = load_pipeline_config(c.config);
    }
    if (c.seed) {
        io::json j = c.config.empty() ? io::json::object() : io::read_json(c.config);
        j["seed"] = *c.seed;
        cfg = pipeline_config_from_json(j, cfg.base_dir);
    }
    return cfg;
}

std::string out_dir(const Common &c, const PipelineConfig &cfg) {
    const std::string dir = c.out.empty() ? cfg.resolve(cfg.out_dir) : c.out;
    fs::create_directories(dir);
    return dir;
}

std::string join(const std::string &dir, const std::string &name) { return (fs::path(dir) / name).string(); }

DeviceModel load_device(const std::string &path) {
    if (!fs::exists(path)) {
        throw ConfigError("device snapshot '" + path + "' does not exist");
    }
    return io::device_from_json(io::read_json(path));
}

std::string pick(const std::string &flag, const PipelineConfig &cfg, const std::string &fallback) {
    return flag.empty() ? cfg.resolve(fallback) : flag;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

// ---------------------------------------------------------------------------------------
// device

void device_new(int qubits, std::uint64_t seed, bool noiseless, const std::string &out) {
    const DeviceModel dev = noiseless ? DeviceModel::noiseless(qubits) : DeviceModel::generate(qubits, seed);
    io::write_json(out, io::to_json(dev));
    std::cout << "wrote " << out << " (" << qubits << " qubits, clock 0 days)\n";
}

void device_drift(const std::string &in, double days, const std::string &out) {
    const DeviceModel dev = drift(load_device(in), days);
    dev.validate();
    io::write_json(out, io::to_json(dev));
    std::cout << "wrote " << out << " (clock " << dev.clock_days << " days)\n";
}

void device_show(const std::string &in) {
    const DeviceModel dev = load_device(in);
    std::cout << "qubits " << dev.n() << ", clock " << dev.clock_days << " days, dt " << dev.geometry.dt_ns
              << " ns\n";
    for (int q = 0; q < dev.n(); ++q) {
        const QubitNoise &qn = dev.qubits[static_cast<std::size_t>(q)];
        std::cout << "  q" << q << "  T1 " << qn.t1_us << " us  T2 " << qn.t2_us << " us  readout " << qn.readout
                  << '\n';
    }
    for (const auto &[p, e] : dev.pairs) {
        std::cout << "  " << p.str() << "  k1 " << e.k1 << "  k2 " << e.k2 << "  b " << e.b << "  cr "
                  << dev.geometry.cr_pulse(p).duration() << " dt\n";
    }
}

// ---------------------------------------------------------------------------------------
// train

void cmd_train(const Common &c) {
    const PipelineConfig cfg = load(c);
    const std::string dir = out_dir(c, cfg);
    const DeviceGeometry geometry = DeviceGeometry::chain(cfg.task.qubits);
    const Circuit ansatz = build_ansatz(cfg);
    const TaskSpec task = build_task(cfg);
    const TrainResult r = train(ansatz, task, cfg.train, geometry);

    TrainedModel m;
    m.circuit = with_params(ansatz, r.params);
    m.task = cfg.task;
    m.beta = cfg.train.beta;
    m.task_loss = r.task_loss;
    m.regu_loss = r.regu_loss;
    m.duration_dsr1 = r.duration;
    io::write_json(join(dir, "model.json"), to_json(m));
    io::write_text(join(dir, "train_trace.csv"), io::trace_csv(r.trace));
    std::cout << "task_loss " << fmt(r.task_loss) << "\nregu_loss " << fmt(r.regu_loss) << "\nduration_dt "
              << r.duration << '\n';
    if (task.kind == TaskSpec::Kind::Vqe) {
        std::cout << "exact_ground_energy " << fmt(ground_energy(task.observable)) << '\n';
    } else {
        std::cout << "accuracy " << accuracy(task, ansatz, r.params) << '\n';
    }
}

// ---------------------------------------------------------------------------------------
// lut

void cmd_lut(const Common &c, const std::string &device_flag, const std::string &model_flag) {
    const PipelineConfig cfg = load(c);
    const std::string dir = out_dir(c, cfg);
    const DeviceModel dev = load_device(pick(device_flag, cfg, cfg.device_path));
    std::vector<QubitPair> pairs;
    if (!model_flag.empty()) {
        pairs = calibration_pairs(model_from_json(io::read_json(model_flag)).circuit);
    } else {
        for (const auto &[p, _] : dev.geometry.cr_pulses) {
            pairs.push_back(p);
        }
    }
    const Lut lut = build_lut(dev, pairs, cfg.lut.n1, cfg.lut.n2, cfg.lut.shots, stage_seed(cfg, SeedStream::Lut));
    io::write_json(join(dir, "lut.json"), io::to_json(lut));
    std::cout << "executions " << lut.executions << " = " << pairs.size() << " pairs x " << cfg.lut.n1 << " x "
              << cfg.lut.n2 << '\n';
    for (const auto &[p, e] : lut.entries) {
        std::cout << "  " << p.str();
        if (e.ok) {
            std::cout << "  k1 " << e.k1 << "  k2 " << e.k2 << "  b " << e.b << "  rms " << e.residual_rms << '\n';
        } else {
            std::cout << "  fit failed: " << e.failure << '\n';
        }
    }
}

// ---------------------------------------------------------------------------------------
// calibrate

void cmd_calibrate(const Common &c, const std::string &model_path, const std::string &lut_path,
                   const std::string &device_flag) {
    const PipelineConfig cfg = load(c);
    const std::string dir = out_dir(c, cfg);
    const TrainedModel m = model_from_json(io::read_json(model_path.empty() ? join(dir, "model.json") : model_path));
    const DeviceGeometry geometry = device_flag.empty() ? DeviceGeometry::chain(m.circuit.n)
                                                        : load_device(device_flag).geometry;
    const Lut lut = io::lut_from_json(io::read_json(lut_path.empty() ? join(dir, "lut.json") : lut_path), geometry);
    const CalibrationResult r = calibrate(m.circuit, lut, geometry, cfg.calib);
    const CalibLoss terms = calib_loss_terms(r.dsr, m.circuit, lut, geometry, cfg.calib.alpha);

    io::json report{{"dsr", io::dsr_to_json(r.dsr)},
                    {"loss", r.loss},
                    {"loss_at_unit", r.loss_at_unit},
                    {"duration_norm", terms.duration_norm},
                    {"error_sum", terms.error_sum},
                    {"alpha", cfg.calib.alpha},
                    {"lut_clock_days", lut.device_clock},
                    {"evaluations", r.search.evaluations},
                    {"trace", io::json::array()}};
    for (const GenerationRecord &g : r.search.trace) {
        report["trace"].push_back({{"generation", g.generation},
                                   {"best_in_generation", io::number_out(g.best_in_generation)},
                                   {"best_so_far", io::number_out(g.best_so_far)},
                                   {"sigma", g.sigma},
                                   {"infeasible", g.infeasible}});
    }
    io::write_json(join(dir, "dsr.json"), io::dsr_to_json(r.dsr));
    io::write_json(join(dir, "calibration.json"), report);
    io::write_text(join(dir, "calib_trace.csv"), io::calibration_trace_csv(r.search));
    for (const auto &[p, d] : r.dsr) {
        std::cout << "dsr " << p.str() << ' ' << fmt(d.value()) << '\n';
    }
    std::cout << "loss " << fmt(r.loss) << " (dsr = 1: " << fmt(r.loss_at_unit) << ")\n";
}

// ---------------------------------------------------------------------------------------
// run

void cmd_run(const Common &c, const std::string &model_path, const std::string &dsr_path,
             const std::string &device_flag, std::optional<std::uint64_t> shots_flag) {
    const PipelineConfig cfg = load(c);
    const std::string dir = out_dir(c, cfg);
    const TrainedModel m = model_from_json(io::read_json(model_path.empty() ? join(dir, "model.json") : model_path));
    const DeviceModel dev = load_device(pick(device_flag, cfg, cfg.device_path));
    const std::uint64_t shots = shots_flag.value_or(cfg.shots);
    const std::vector<QubitPair> pairs = calibration_pairs(m.circuit);
    const DsrAssignment dsr = dsr_path.empty() ? uniform_dsr(pairs, 1.0) : io::dsr_from_json(io::read_json(dsr_path));

    const CompiledProgram prog = compile_rzx(m.circuit, dsr, dev.geometry);
    const std::uint64_t seed = stage_seed(cfg, SeedStream::Run);
    const ExecutionResult r = execute(prog, dev, shots, seed);
    const StateVector ideal = simulate(m.circuit);
    const std::vector<double> probs = ideal.probabilities();
    const double fidelity = output_fidelity(r.counts, probs, m.circuit.n);

    io::json out{{"shots", shots},
                 {"duration_dt", r.duration_dt},
                 {"duration_us", r.duration_us},
                 {"clock_days", r.clock_days},
                 {"dsr", io::dsr_to_json(dsr)},
                 {"fidelity", fidelity},
                 {"counts", r.counts}};
    std::cout << "duration_dt " << r.duration_dt << "\nfidelity " << fmt(fidelity) << '\n';
    if (m.task.kind == "vqe") {
        const Observable h = tfim(m.task.qubits, m.task.j, m.task.h);
        const EnergyEstimate e = estimate_energy(m.circuit, h, dsr, dev, shots, derive_seed(seed, 1));
        const double exact = expectation(ideal, h);
        out["energy"] = e.energy;
        out["energy_std_error"] = e.std_error;
        out["energy_statevector"] = exact;
        out["ground_energy"] = ground_energy(h);
        std::cout << "energy " << fmt(e.energy) << " +- " << fmt(e.std_error) << " (statevector " << fmt(exact)
                  << ")\n";
    }
    io::write_json(join(dir, "run.json"), out);
}

// ---------------------------------------------------------------------------------------
// report

std::string report_duration_curve(const DeviceGeometry &geometry, int points) {
    std::ostringstream out;
    out.precision(17);
    out << "theta,duration_dt,duration_us\n";
    Circuit probe(2);
    probe.rzx(0, 1, 0.0);
    for (int k = 0; k < points; ++k) {
        const double theta = -kPi + 2.0 * kPi * k / (points - 1);
        probe.gates[0].param = Param::constant(theta);
        const std::int64_t d = compile_rzx_nominal(probe, geometry).duration();
        out << theta << ',' << d << ',' << geometry.to_us(d) << '\n';
    }
    return out.str();
}

std::string report_p00_surface(const DeviceModel &dev, const PipelineConfig &cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "pair,theta,dsr,p00,p00_ideal\n";
    std::uint64_t stream = 0;
    for (const auto &[p, _] : dev.geometry.cr_pulses) {
        for (double theta : lut_theta_grid(cfg.lut.n1)) {
            for (double d : lut_dsr_grid(cfg.lut.n2)) {
                const double p00 = benchmark_rzx(dev, p, theta, d, cfg.lut.shots,
                                                 derive_seed(stage_seed(cfg, SeedStream::Lut), stream++));
                const double c = std::cos(theta / 2.0);
                out << p.str() << ',' << theta << ',' << d << ',' << p00 << ',' << c * c << '\n';
            }
        }
    }
    return out.str();
}

std::string report_fidelity_vs_dsr(const TrainedModel &m, const DeviceModel &dev, const PipelineConfig &cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "dsr,fidelity,duration_dt\n";
    const std::vector<double> probs = simulate(m.circuit).probabilities();
    const std::vector<QubitPair> pairs = calibration_pairs(m.circuit);
    for (int k = 0; k <= 18; ++k) {
        const double d = kDsrMin + (kDsrMax - kDsrMin) * k / 18.0;
        try {
            const CompiledProgram prog = compile_rzx(m.circuit, uniform_dsr(pairs, d), dev.geometry);
            const ExecutionResult r = execute(prog, dev, cfg.shots, derive_seed(stage_seed(cfg, SeedStream::Run), k));
            out << d << ',' << output_fidelity(r.counts, probs, m.circuit.n) << ',' << r.duration_dt << '\n';
        } catch (const AmplitudeSaturation &) {
            out << d << ",,\n";
        }
    }
    return out.str();
}

std::string report_calib_trace(const io::json &report) {
    std::ostringstream out;
    out.precision(17);
    out << "generation,best_in_generation,best_so_far,sigma,infeasible\n";
    for (const io::json &g : io::array(report, "trace", "calibration")) {
        out << io::integer(g, "generation", "trace") << ',' << io::num(g, "best_in_generation", "trace") << ','
            << io::num(g, "best_so_far", "trace") << ',' << io::num(g, "sigma", "trace") << ','
            << io::integer(g, "infeasible", "trace") << '\n';
    }
    return out.str();
}

void cmd_report(const Common &c, const std::string &kind, const std::string &model_path,
                const std::string &device_flag, const std::string &calibration_path, int points) {
    const PipelineConfig cfg = load(c);
    const std::string dir = out_dir(c, cfg);
    std::string csv;
    if (kind == "duration-curve") {
        if (points < 3) {
            throw ConfigError("--points must be at least 3");
        }
        const DeviceGeometry geometry =
            device_flag.empty() ? DeviceGeometry::chain(2) : load_device(device_flag).geometry;
        csv = report_duration_curve(geometry, points);
    } else if (kind == "p00-surface") {
        csv = report_p00_surface(load_device(pick(device_flag, cfg, cfg.device_path)), cfg);
    } else if (kind == "fidelity-vs-dsr") {
        const TrainedModel m = model_from_json(io::read_json(model_path.empty() ? join(dir, "model.json") : model_path));
        csv = report_fidelity_vs_dsr(m, load_device(pick(device_flag, cfg, cfg.device_path)), cfg);
    } else {
        csv = report_calib_trace(
            io::read_json(calibration_path.empty() ? join(dir, "calibration.json") : calibration_path));
    }
    const std::string path = join(dir, kind + ".csv");
    io::write_text(path, csv);
    std::cout << "wrote " << path << '\n';
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qupad: duration-aware variational circuits on a synthetic pulse-level device"};
    app.require_subcommand(1);

    // device
    CLI::App *device = app.add_subcommand("device", "create, drift or inspect a device snapshot");
    device->require_subcommand(1);
    int qubits = 4;
    std::uint64_t device_seed = 0;
    bool noiseless = false;
    std::string device_out = "device.json";
    CLI::App *dnew = device->add_subcommand("new", "generate a seeded device snapshot");
    dnew->add_option("--qubits", qubits, "number of qubits on the chain")->capture_default_str();
    dnew->add_option("--seed", device_seed, "generation seed")->capture_default_str();
    dnew->add_flag("--noiseless", noiseless, "ideal device with no errors");
    dnew->add_option("--out", device_out, "snapshot path")->capture_default_str();
    std::string device_in;
    double days = 1.0;
    std::string drift_out;
    CLI::App *ddrift = device->add_subcommand("drift", "advance a snapshot's clock");
    ddrift->add_option("--in", device_in, "snapshot to read")->required();
    ddrift->add_option("--days", days, "days to advance")->capture_default_str();
    ddrift->add_option("--out", drift_out, "output path (default: overwrite --in)");
    CLI::App *dshow = device->add_subcommand("show", "print a snapshot's parameters");
    dshow->add_option("--in", device_in, "snapshot to read")->required();

    Common common;
    std::string device_flag;
    std::string model_flag;
    std::string lut_flag;
    std::string dsr_flag;
    std::string calibration_flag;
    std::optional<std::uint64_t> shots_flag;
    std::string report_kind;
    int points = 101;

    CLI::App *train_cmd = app.add_subcommand("train", "train the ansatz; writes model.json and train_trace.csv");
    add_common(train_cmd, common, "output directory (default: config 'out', else ./out)");

    CLI::App *lut_cmd = app.add_subcommand("lut", "benchmark the device and fit per-pair error models; writes lut.json");
    add_common(lut_cmd, common, "output directory (default: config 'out', else ./out)");
    lut_cmd->add_option("--device", device_flag, "device snapshot (default: config 'device')");
    lut_cmd->add_option("--model", model_flag, "restrict to pairs used by this model (default: all pairs)");

    CLI::App *cal_cmd = app.add_subcommand("calibrate", "search per-pair dsr; writes dsr.json and calibration.json");
    add_common(cal_cmd, common, "output directory (default: config 'out', else ./out)");
    cal_cmd->add_option("--model", model_flag, "trained model (default: <out>/model.json)");
    cal_cmd->add_option("--lut", lut_flag, "LUT file (default: <out>/lut.json)");
    cal_cmd->add_option("--device", device_flag, "snapshot supplying the geometry (default: chain defaults)");

    CLI::App *run_cmd = app.add_subcommand("run", "execute a model on the device; writes run.json");
    add_common(run_cmd, common, "output directory (default: config 'out', else ./out)");
    run_cmd->add_option("--model", model_flag, "trained model (default: <out>/model.json)");
    run_cmd->add_option("--dsr", dsr_flag, "dsr assignment (default: 1 on every pair)");
    run_cmd->add_option("--device", device_flag, "device snapshot (default: config 'device')");
    run_cmd->add_option("--shots", shots_flag, "shots (default: config 'shots', else 8192)");

    CLI::App *report_cmd = app.add_subcommand("report", "emit figure datasets as CSV");
    add_common(report_cmd, common, "output directory (default: config 'out', else ./out)");
    report_cmd->add_option("kind", report_kind, "duration-curve | p00-surface | fidelity-vs-dsr | calib-trace")
        ->required()
        ->check(CLI::IsMember({"duration-curve", "p00-surface", "fidelity-vs-dsr", "calib-trace"}));
    report_cmd->add_option("--model", model_flag, "trained model (default: <out>/model.json)");
    report_cmd->add_option("--device", device_flag, "device snapshot (default: config 'device')");
    report_cmd->add_option("--calibration", calibration_flag, "calibration report (default: <out>/calibration.json)");
    report_cmd->add_option("--points", points, "theta points for duration-curve")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*dnew) {
            device_new(qubits, device_seed, noiseless, device_out);
        } else if (*ddrift) {
            device_drift(device_in, days, drift_out.empty() ? device_in : drift_out);
        } else if (*dshow) {
            device_show(device_in);
        } else if (*train_cmd) {
            cmd_train(common);
        } else if (*lut_cmd) {
            cmd_lut(common, device_flag, model_flag);
        } else if (*cal_cmd) {
            cmd_calibrate(common, model_flag, lut_flag, device_flag);
        } else if (*run_cmd) {
            cmd_run(common, model_flag, dsr_flag, device_flag, shots_flag);
        } else if (*report_cmd) {
            cmd_report(common, report_kind, model_flag, device_flag, calibration_flag, points);
        }
    } catch (const InfeasibleError &e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return kExitInfeasible;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ArgumentError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericError &e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const AmplitudeSaturation &e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
