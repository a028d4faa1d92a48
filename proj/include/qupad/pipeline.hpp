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

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "qupad/ansatz.hpp"
#include "qupad/calibrator.hpp"
#include "qupad/compiler.hpp"
#include "qupad/device.hpp"
#include "qupad/io.hpp"
#include "qupad/lut.hpp"
#include "qupad/trainer.hpp"

namespace qupad {

struct TaskConfig {
    std::string kind = "vqe";  // "vqe" or "classify"
    int qubits = 4;
    double j = 1.0;  // TFIM coupling
    double h = 1.0;  // TFIM field
    int samples_per_class = 10;
    double noise = 0.25;
};

struct AnsatzConfig {
    int layers = 3;
    RotationLayer rotation = RotationLayer::RyRz;
    double spread = 0.3;
};

struct LutConfig {
    int n1 = 9;
    int n2 = 5;
    std::uint64_t shots = 8192;
};

/// Everything a pipeline run needs. Relative paths resolve against `base_dir`.
struct PipelineConfig {
    std::uint64_t seed = 0;
    std::string device_path = "device.json";
    TaskConfig task;
    AnsatzConfig ansatz;
    TrainConfig train;
    LutConfig lut;
    CalibConfig calib;
    std::uint64_t shots = 8192;
    std::string out_dir = "out";
    std::string base_dir = ".";

    std::string resolve(const std::string &p) const {
        const std::filesystem::path path(p);
        return path.is_absolute() ? p : (std::filesystem::path(base_dir) / path).lexically_normal().string();
    }
};

/// Per-stage seeds derived from the global one, so every stage is reproducible on its own.
enum class SeedStream : std::uint64_t { Ansatz = 10, Data = 11, Train = 12, Lut = 13, Calibrate = 14, Run = 15 };

inline std::uint64_t stage_seed(const PipelineConfig &cfg, SeedStream s) {
    return derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
}

inline PipelineConfig pipeline_config_from_json(const io::json &j, const std::string &base_dir,
                                                const std::string &path = "config") {
    using io::field;
    using io::integer;
    using io::num_or;
    PipelineConfig c;
    c.base_dir = base_dir;
    if (!j.is_object()) {
        throw SchemaError(path + ": expected an object");
    }
    if (j.contains("seed")) {
        c.seed = io::unsigned_integer(j, "seed", path);
    }
    if (j.contains("device")) {
        c.device_path = io::str(j, "device", path);
    }
    if (j.contains("out")) {
        c.out_dir = io::str(j, "out", path);
    }
    if (j.contains("shots")) {
        c.shots = io::unsigned_integer(j, "shots", path);
    }
    if (j.contains("task")) {
        const io::json &t = j["task"];
        const std::string tp = path + ".task";
        c.task.kind = t.contains("kind") ? io::str(t, "kind", tp) : c.task.kind;
        if (c.task.kind != "vqe" && c.task.kind != "classify") {
            throw SchemaError(tp + ".kind: expected 'vqe' or 'classify'");
        }
        c.task.qubits = t.contains("qubits") ? static_cast<int>(integer(t, "qubits", tp)) : c.task.qubits;
        c.task.j = num_or(t, "j", c.task.j, tp);
        c.task.h = num_or(t, "h", c.task.h, tp);
        c.task.samples_per_class =
            t.contains("samples_per_class") ? static_cast<int>(integer(t, "samples_per_class", tp)) : c.task.samples_per_class;
        c.task.noise = num_or(t, "noise", c.task.noise, tp);
    }
    if (j.contains("ansatz")) {
        const io::json &a = j["ansatz"];
        const std::string ap = path + ".ansatz";
        c.ansatz.layers = a.contains("layers") ? static_cast<int>(integer(a, "layers", ap)) : c.ansatz.layers;
        if (a.contains("rotation")) {
            c.ansatz.rotation = rotation_layer_from_name(io::str(a, "rotation", ap));
        }
        c.ansatz.spread = num_or(a, "spread", c.ansatz.spread, ap);
    }
    if (j.contains("train")) {
        const io::json &t = j["train"];
        const std::string tp = path + ".train";
        c.train.beta = num_or(t, "beta", c.train.beta, tp);
        c.train.lr = num_or(t, "lr", c.train.lr, tp);
        c.train.lr_decay = num_or(t, "lr_decay", c.train.lr_decay, tp);
        c.train.iterations = t.contains("iterations") ? static_cast<int>(integer(t, "iterations", tp)) : c.train.iterations;
        c.train.duration_every =
            t.contains("duration_every") ? static_cast<int>(integer(t, "duration_every", tp)) : c.train.duration_every;
        if (t.contains("optimizer")) {
            c.train.optimizer = optimizer_from_name(io::str(t, "optimizer", tp));
        }
        if (t.contains("gradient")) {
            const std::string g = io::str(t, "gradient", tp);
            if (g != "adjoint" && g != "parameter-shift") {
                throw SchemaError(tp + ".gradient: expected 'adjoint' or 'parameter-shift'");
            }
            c.train.gradient = g == "adjoint" ? GradientSource::Adjoint : GradientSource::ParameterShift;
        }
    }
    if (j.contains("lut")) {
        const io::json &l = j["lut"];
        const std::string lp = path + ".lut";
        c.lut.n1 = l.contains("n1") ? static_cast<int>(integer(l, "n1", lp)) : c.lut.n1;
        c.lut.n2 = l.contains("n2") ? static_cast<int>(integer(l, "n2", lp)) : c.lut.n2;
        c.lut.shots = l.contains("shots") ? io::unsigned_integer(l, "shots", lp) : c.lut.shots;
    }
    if (j.contains("calibrate")) {
        const io::json &k = j["calibrate"];
        const std::string kp = path + ".calibrate";
        c.calib.alpha = num_or(k, "alpha", c.calib.alpha, kp);
        c.calib.generations = k.contains("generations") ? static_cast<int>(integer(k, "generations", kp)) : c.calib.generations;
        c.calib.population = k.contains("population") ? static_cast<int>(integer(k, "population", kp)) : c.calib.population;
        c.calib.sigma0 = num_or(k, "sigma0", c.calib.sigma0, kp);
        c.calib.penalty = num_or(k, "penalty", c.calib.penalty, kp);
    }
    try {
        c.train.validate();
        c.calib.validate();
    } catch (const ConfigError &e) {
        throw SchemaError(path + ": " + e.what());
    }
    if (c.task.qubits < 2 || c.ansatz.layers < 1 || c.shots < 1 || c.lut.shots < 1) {
        throw SchemaError(path + ": need qubits >= 2, layers >= 1 and positive shot counts");
    }
    c.train.seed = stage_seed(c, SeedStream::Train);
    c.calib.seed = stage_seed(c, SeedStream::Calibrate);
    return c;
}

inline PipelineConfig load_pipeline_config(const std::string &file) {
    const auto base = std::filesystem::path(file).parent_path().string();
    return pipeline_config_from_json(io::read_json(file), base.empty() ? "." : base);
}

inline TaskSpec build_task(const PipelineConfig &cfg) {
    if (cfg.task.kind == "vqe") {
        return TaskSpec::vqe(tfim(cfg.task.qubits, cfg.task.j, cfg.task.h));
    }
    if (cfg.task.qubits != 4) {
        throw ConfigError("the synthetic classification task uses 4 qubits");
    }
    return TaskSpec::classify(
        synthetic_classifier(cfg.task.samples_per_class, stage_seed(cfg, SeedStream::Data), cfg.task.noise));
}

inline Circuit build_ansatz(const PipelineConfig &cfg) {
    return hea_rzx(cfg.task.qubits, cfg.ansatz.layers, cfg.ansatz.rotation, stage_seed(cfg, SeedStream::Ansatz),
                   cfg.ansatz.spread);
}

inline Circuit with_params(Circuit c, const std::vector<double> &params) {
    if (params.size() != c.params.size()) {
        throw ArgumentError("parameter count does not match the circuit");
    }
    c.params = params;
    return c;
}

// ---------------------------------------------------------------------------------------
// Trained model file

struct TrainedModel {
    Circuit circuit;  // parameters hold the trained values
    TaskConfig task;
    double beta = 0.0;
    double task_loss = 0.0;
    double regu_loss = 0.0;
    std::int64_t duration_dsr1 = 0;
};

inline io::json to_json(const TrainedModel &m) {
    return io::json{{"circuit", io::to_json(m.circuit)},
                    {"task",
                     {{"kind", m.task.kind},
                      {"qubits", m.task.qubits},
                      {"j", m.task.j},
                      {"h", m.task.h},
                      {"samples_per_class", m.task.samples_per_class},
                      {"noise", m.task.noise}}},
                    {"params", m.circuit.params},
                    {"beta", m.beta},
                    {"task_loss", m.task_loss},
                    {"regu_loss", m.regu_loss},
                    {"duration_dsr1", m.duration_dsr1}};
}

inline TrainedModel model_from_json(const io::json &j, const std::string &path = "model") {
    TrainedModel m;
    m.circuit = io::circuit_from_json(io::field(j, "circuit", path), path + ".circuit");
    const io::json &t = io::field(j, "task", path);
    const std::string tp = path + ".task";
    m.task.kind = io::str(t, "kind", tp);
    m.task.qubits = static_cast<int>(io::integer(t, "qubits", tp));
    m.task.j = io::num(t, "j", tp);
    m.task.h = io::num(t, "h", tp);
    m.task.samples_per_class = static_cast<int>(io::integer(t, "samples_per_class", tp));
    m.task.noise = io::num(t, "noise", tp);
    m.beta = io::num(j, "beta", path);
    m.task_loss = io::num(j, "task_loss", path);
    m.regu_loss = io::num(j, "regu_loss", path);
    m.duration_dsr1 = io::integer(j, "duration_dsr1", path);
    return m;
}

// ---------------------------------------------------------------------------------------
// Energy estimation from counts

/// Measurement basis of a term: the Pauli letter on each qubit, 'Z' where the term is I.
inline std::string measurement_basis(const PauliTerm &t) {
    std::string b = t.paulis;
    for (char &ch : b) {
        ch = ch == 'I' ? 'Z' : ch;
    }
    return b;
}

/// Greedy qubit-wise commuting groups. Each group carries one basis string that every
/// member term agrees with on its non-identity qubits.
inline std::vector<std::pair<std::string, std::vector<const PauliTerm *>>> measurement_groups(const Observable &o) {
    std::vector<std::pair<std::string, std::vector<const PauliTerm *>>> groups;
    for (const PauliTerm &t : o.terms) {
        if (t.paulis.find_first_not_of('I') == std::string::npos) {
            continue;
        }
        bool placed = false;
        for (auto &[basis, members] : groups) {
            bool fits = true;
            for (std::size_t i = 0; i < basis.size() && fits; ++i) {
                fits = t.paulis[i] == 'I' || basis[i] == 'I' || basis[i] == t.paulis[i];
            }
            if (fits) {
                for (std::size_t i = 0; i < basis.size(); ++i) {
                    basis[i] = basis[i] == 'I' ? t.paulis[i] : basis[i];
                }
                members.push_back(&t);
                placed = true;
                break;
            }
        }
        if (!placed) {
            groups.push_back({t.paulis, {&t}});
        }
    }
    for (auto &[basis, _] : groups) {
        for (char &ch : basis) {
            ch = ch == 'I' ? 'Z' : ch;
        }
    }
    return groups;
}

/// Appends the rotations that map the given basis onto Z measurements.
inline Circuit rotate_to_basis(Circuit c, const std::string &basis) {
    for (int q = 0; q < c.n; ++q) {
        const char p = basis[basis.size() - 1 - static_cast<std::size_t>(q)];
        if (p == 'X') {
            c.h(q);
        } else if (p == 'Y') {
            c.rx(q, kHalfPi);
        }
    }
    return c;
}

/// +-1 eigenvalue of a term's Z-basis image on one measured bitstring index.
inline double parity_sign(std::size_t idx, const PauliTerm &t) {
    int parity = 0;
    for (int q = 0; q < static_cast<int>(t.paulis.size()); ++q) {
        if (t.on(q) != 'I' && ((idx >> q) & 1U)) {
            parity ^= 1;
        }
    }
    return parity ? -1.0 : 1.0;
}

struct EnergyEstimate {
    double energy = 0.0;
    double std_error = 0.0;  // sample standard error, summed in quadrature over groups
};

/// Energy of `obs` from device executions, one compiled program per measurement group.
inline EnergyEstimate estimate_energy(const Circuit &c, const Observable &obs, const DsrAssignment &dsr,
                                      const DeviceModel &dev, std::uint64_t shots, std::uint64_t seed) {
    EnergyEstimate e;
    for (const PauliTerm &t : obs.terms) {
        if (t.paulis.find_first_not_of('I') == std::string::npos) {
            e.energy += t.coeff;
        }
    }
    double var = 0.0;
    std::uint64_t stream = 0;
    for (const auto &[basis, terms] : measurement_groups(obs)) {
        const CompiledProgram prog = compile_rzx(rotate_to_basis(c, basis), dsr, dev.geometry);
        const ExecutionResult r = execute(prog, dev, shots, derive_seed(seed, stream++));
        double m1 = 0.0;
        double m2 = 0.0;
        for (const auto &[bits, count] : r.counts) {
            const std::size_t idx = index_of_bitstring(bits);
            double v = 0.0;
            for (const PauliTerm *t : terms) {
                v += t->coeff * parity_sign(idx, *t);
            }
            const double w = static_cast<double>(count) / static_cast<double>(shots);
            m1 += w * v;
            m2 += w * v * v;
        }
        e.energy += m1;
        var += std::max(0.0, m2 - m1 * m1) / static_cast<double>(shots);
    }
    e.std_error = std::sqrt(var);
    return e;
}

}  // namespace qupad
