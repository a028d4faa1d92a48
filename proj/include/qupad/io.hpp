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
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qupad/calibrator.hpp"
#include "qupad/circuit.hpp"
#include "qupad/compiler.hpp"
#include "qupad/device.hpp"
#include "qupad/errors.hpp"
#include "qupad/lut.hpp"
#include "qupad/pulse.hpp"
#include "qupad/trainer.hpp"

namespace qupad::io {

using nlohmann::json;

// ---------------------------------------------------------------------------------------
// Field access with path-carrying errors

inline const json &field(const json &j, const std::string &key, const std::string &path) {
    if (!j.is_object()) {
        throw SchemaError(path + ": expected an object");
    }
    auto it = j.find(key);
    if (it == j.end()) {
        throw SchemaError(path + "." + key + ": missing field");
    }
    return *it;
}

inline double num(const json &j, const std::string &path) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
    }
    if (!j.is_number()) {
        throw SchemaError(path + ": expected a number");
    }
    return j.get<double>();
}

inline double num(const json &j, const std::string &key, const std::string &path) {
    return num(field(j, key, path), path + "." + key);
}

inline double num_or(const json &j, const std::string &key, double fallback, const std::string &path) {
    return j.contains(key) ? num(j, key, path) : fallback;
}

inline std::int64_t integer(const json &j, const std::string &key, const std::string &path) {
    const json &v = field(j, key, path);
    if (!v.is_number_integer()) {
        throw SchemaError(path + "." + key + ": expected an integer");
    }
    return v.get<std::int64_t>();
}

inline std::uint64_t unsigned_integer(const json &j, const std::string &key, const std::string &path) {
    const json &v = field(j, key, path);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
        throw SchemaError(path + "." + key + ": expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

inline std::string str(const json &j, const std::string &key, const std::string &path) {
    const json &v = field(j, key, path);
    if (!v.is_string()) {
        throw SchemaError(path + "." + key + ": expected a string");
    }
    return v.get<std::string>();
}

inline const json &array(const json &j, const std::string &key, const std::string &path) {
    const json &v = field(j, key, path);
    if (!v.is_array()) {
        throw SchemaError(path + "." + key + ": expected an array");
    }
    return v;
}

/// Finite numbers as-is; infinities as the string "inf".
inline json number_out(double v) {
    if (std::isinf(v) && v > 0.0) {
        return "inf";
    }
    return v;
}

// ---------------------------------------------------------------------------------------
// Files

inline std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json read_json(const std::string &path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error &e) {
        throw SchemaError(path + ": " + e.what());
    }
}

/// Writes `text` to `path`, creating missing parent directories.
inline void write_text(const std::string &path, const std::string &text) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) {
        std::filesystem::create_directories(parent, ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write " + path);
    }
    out << text;
}

inline void write_json(const std::string &path, const json &j) { write_text(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------------------
// Pairs and dsr

inline QubitPair parse_pair(const std::string &s, const std::string &path) {
    const auto dash = s.find('-');
    try {
        if (dash == std::string::npos) {
            throw std::invalid_argument(s);
        }
        std::size_t used = 0;
        const int c = std::stoi(s.substr(0, dash), &used);
        if (used != dash) {
            throw std::invalid_argument(s);
        }
        const std::string rest = s.substr(dash + 1);
        const int t = std::stoi(rest, &used);
        if (used != rest.size()) {
            throw std::invalid_argument(s);
        }
        return {c, t};
    } catch (const std::exception &) {
        throw SchemaError(path + ": bad qubit pair '" + s + "', expected 'control-target'");
    }
}

inline json dsr_to_json(const DsrAssignment &d) {
    json j = json::object();
    for (const auto &[p, v] : d) {
        j[p.str()] = v.value();
    }
    return j;
}

inline DsrAssignment dsr_from_json(const json &j, const std::string &path = "dsr") {
    if (!j.is_object()) {
        throw SchemaError(path + ": expected an object of pair -> dsr");
    }
    DsrAssignment out;
    for (const auto &[k, v] : j.items()) {
        try {
            out[parse_pair(k, path)] = Dsr(num(v, path + "." + k));
        } catch (const ArgumentError &e) {
            throw SchemaError(path + "." + k + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------
// Circuits and observables

inline json to_json(const Circuit &c) {
    json gates = json::array();
    for (const Gate &g : c.gates) {
        json jg{{"kind", std::string(gate_name(g.kind))}, {"qubits", g.qubits}};
        if (g.param.is_trainable()) {
            jg["param"] = json{{"index", g.param.index}};
        } else if (is_parameterized(g.kind)) {
            jg["param"] = g.param.value;
        }
        gates.push_back(jg);
    }
    return json{{"n", c.n}, {"gates", gates}, {"params", c.params}};
}

inline Circuit circuit_from_json(const json &j, const std::string &path = "circuit") {
    Circuit c(static_cast<int>(integer(j, "n", path)));
    const json &gates = array(j, "gates", path);
    for (std::size_t i = 0; i < gates.size(); ++i) {
        const std::string gp = path + ".gates[" + std::to_string(i) + "]";
        const std::string kind = str(gates[i], "kind", gp);
        const auto k = gate_kind_from_name(kind);
        if (!k) {
            throw SchemaError(gp + ".kind: unknown gate '" + kind + "'");
        }
        Gate g;
        g.kind = *k;
        for (const json &q : array(gates[i], "qubits", gp)) {
            if (!q.is_number_integer()) {
                throw SchemaError(gp + ".qubits: expected integers");
            }
            g.qubits.push_back(q.get<int>());
        }
        if (gates[i].contains("param")) {
            const json &p = gates[i]["param"];
            if (p.is_object()) {
                g.param = Param::trainable(static_cast<int>(integer(p, "index", gp + ".param")));
            } else {
                g.param = Param::constant(num(p, gp + ".param"));
            }
        }
        c.gates.push_back(std::move(g));
    }
    if (j.contains("params")) {
        for (const json &v : array(j, "params", path)) {
            c.params.push_back(num(v, path + ".params"));
        }
    }
    try {
        c.validate();
    } catch (const ArgumentError &e) {
        throw SchemaError(path + ": " + e.what());
    }
    return c;
}

inline json to_json(const Observable &o) {
    json terms = json::array();
    for (const PauliTerm &t : o.terms) {
        terms.push_back({{"coeff", t.coeff}, {"paulis", t.paulis}});
    }
    return json{{"n", o.n}, {"terms", terms}};
}

inline Observable observable_from_json(const json &j, const std::string &path = "observable") {
    Observable o;
    o.n = static_cast<int>(integer(j, "n", path));
    const json &terms = array(j, "terms", path);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::string tp = path + ".terms[" + std::to_string(i) + "]";
        o.terms.push_back({num(terms[i], "coeff", tp), str(terms[i], "paulis", tp)});
    }
    try {
        o.validate();
    } catch (const ArgumentError &e) {
        throw SchemaError(path + ": " + e.what());
    }
    return o;
}

// ---------------------------------------------------------------------------------------
// Pulses and compiled programs

inline json to_json(const GaussianSquarePulse &p) {
    return json{{"kind", "gaussian_square"}, {"A", p.amplitude}, {"phase", p.phase},       {"sigma", p.sigma},
                {"width", p.width},          {"risefall", p.risefall}, {"duration", std::llround(p.duration())}};
}

inline GaussianSquarePulse pulse_from_json(const json &j, const std::string &path) {
    GaussianSquarePulse p;
    p.amplitude = num(j, "A", path);
    p.phase = num_or(j, "phase", 0.0, path);
    p.sigma = num(j, "sigma", path);
    p.width = num(j, "width", path);
    p.risefall = num(j, "risefall", path);
    try {
        check_pulse(p);
    } catch (const ArgumentError &e) {
        throw SchemaError(path + ": " + e.what());
    }
    return p;
}

inline json to_json(const PulseSchedule &s) {
    json channels = json::array();
    for (const Channel &c : s.channels()) {
        channels.push_back(c.name());
    }
    json ins = json::array();
    for (const PulseInstruction &i : s.instructions) {
        json pulse;
        if (const auto *gs = std::get_if<GaussianSquarePulse>(&i.payload)) {
            pulse = to_json(*gs);
        } else {
            const auto &sq = std::get<SqPulse>(i.payload);
            pulse = json{{"kind", "sq"}, {"label", sq.label}, {"duration", sq.duration}};
        }
        ins.push_back({{"channel", i.channel.name()}, {"start", i.start}, {"pulse", pulse}});
    }
    return json{{"channels", channels}, {"total_duration", s.total_duration}, {"instructions", ins}};
}

inline Channel channel_from_name(const std::string &s, const std::string &path) {
    try {
        if (s.size() > 1 && s[0] == 'd') {
            std::size_t used = 0;
            const int q = std::stoi(s.substr(1), &used);
            if (used == s.size() - 1) {
                return Channel::drive(q);
            }
        } else if (s.size() > 1 && s[0] == 'u') {
            return Channel::control(parse_pair(s.substr(1), path));
        }
    } catch (const std::logic_error &) {
    }
    throw SchemaError(path + ": bad channel name '" + s + "'");
}

inline PulseSchedule schedule_from_json(const json &j, const std::string &path = "schedule") {
    PulseSchedule s;
    const json &ins = array(j, "instructions", path);
    for (std::size_t k = 0; k < ins.size(); ++k) {
        const std::string ip = path + ".instructions[" + std::to_string(k) + "]";
        PulseInstruction inst;
        inst.channel = channel_from_name(str(ins[k], "channel", ip), ip + ".channel");
        inst.start = integer(ins[k], "start", ip);
        const json &pj = field(ins[k], "pulse", ip);
        if (str(pj, "kind", ip + ".pulse") == "sq") {
            inst.payload = SqPulse{str(pj, "label", ip + ".pulse"), integer(pj, "duration", ip + ".pulse")};
        } else {
            inst.payload = pulse_from_json(pj, ip + ".pulse");
        }
        s.add(std::move(inst));
    }
    if (j.contains("total_duration") && integer(j, "total_duration", path) != s.total_duration) {
        throw SchemaError(path + ".total_duration: does not match the instructions");
    }
    return s;
}

/// Gate-to-pulse sidecar of a compiled program.
inline json provenance_json(const CompiledProgram &prog) {
    json gates = json::array();
    for (std::size_t k = 0; k < prog.circuit.gates.size(); ++k) {
        const Gate &g = prog.circuit.gates[k];
        json jg{{"index", k}, {"kind", std::string(gate_name(g.kind))}, {"qubits", g.qubits},
                {"instructions", prog.provenance[k]}};
        if (is_parameterized(g.kind)) {
            jg["angle"] = g.param.resolve(prog.circuit.params);
        }
        gates.push_back(jg);
    }
    json exposure = json::object();
    for (const auto &[p, t] : prog.exposure) {
        exposure[p.str()] = t;
    }
    return json{{"gates", gates},
                {"dsr", dsr_to_json(prog.dsr)},
                {"exposure", exposure},
                {"elided_rzx", prog.elided_rzx},
                {"total_duration", prog.duration()}};
}

// ---------------------------------------------------------------------------------------
// Device snapshots

inline json to_json(const PairNoise &e) { return json{{"k1", e.k1}, {"k2", e.k2}, {"b", e.b}}; }

inline PairNoise pair_noise_from_json(const json &j, const std::string &path) {
    return {num(j, "k1", path), num(j, "k2", path), num(j, "b", path)};
}

inline json to_json(const QubitNoise &q) {
    return json{{"t1_us", number_out(q.t1_us)}, {"t2_us", number_out(q.t2_us)}, {"readout", q.readout}};
}

inline QubitNoise qubit_noise_from_json(const json &j, const std::string &path) {
    return {num(j, "t1_us", path), num(j, "t2_us", path), num(j, "readout", path)};
}

inline json to_json(const DeviceModel &d) {
    json pairs = json::array();
    for (const auto &[p, pulse] : d.geometry.cr_pulses) {
        pairs.push_back({{"pair", p.str()},
                         {"cr_pulse", to_json(pulse)},
                         {"noise", to_json(d.pairs.at(p))},
                         {"mean", to_json(d.pair_means.at(p))}});
    }
    json qubits = json::array();
    for (std::size_t q = 0; q < d.qubits.size(); ++q) {
        json jq = to_json(d.qubits[q]);
        jq["mean"] = to_json(d.qubit_means[q]);
        qubits.push_back(jq);
    }
    const DriftSpec &s = d.drift;
    return json{{"n", d.geometry.n},
                {"dt_ns", d.geometry.dt_ns},
                {"sq_duration", d.geometry.sq_duration},
                {"pairs", pairs},
                {"qubits", qubits},
                {"drift",
                 {{"reversion", s.reversion},
                  {"k1_std", s.k1_std},
                  {"k2_std", s.k2_std},
                  {"b_std", s.b_std},
                  {"t1_std", s.t1_std},
                  {"t2_std", s.t2_std},
                  {"readout_std", s.readout_std}}},
                {"rng", {{"seed", d.rng_seed}, {"draws", d.rng_draws}}},
                {"clock_days", d.clock_days}};
}

inline DeviceModel device_from_json(const json &j, const std::string &path = "device") {
    DeviceModel d;
    d.geometry.n = static_cast<int>(integer(j, "n", path));
    d.geometry.dt_ns = num(j, "dt_ns", path);
    d.geometry.sq_duration = integer(j, "sq_duration", path);
    const json &pairs = array(j, "pairs", path);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const std::string pp = path + ".pairs[" + std::to_string(i) + "]";
        const QubitPair p = parse_pair(str(pairs[i], "pair", pp), pp + ".pair");
        d.geometry.cr_pulses[p] = pulse_from_json(field(pairs[i], "cr_pulse", pp), pp + ".cr_pulse");
        d.pairs[p] = pair_noise_from_json(field(pairs[i], "noise", pp), pp + ".noise");
        d.pair_means[p] = pair_noise_from_json(field(pairs[i], "mean", pp), pp + ".mean");
    }
    const json &qubits = array(j, "qubits", path);
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        const std::string qp = path + ".qubits[" + std::to_string(i) + "]";
        d.qubits.push_back(qubit_noise_from_json(qubits[i], qp));
        d.qubit_means.push_back(qubit_noise_from_json(field(qubits[i], "mean", qp), qp + ".mean"));
    }
    const json &s = field(j, "drift", path);
    const std::string sp = path + ".drift";
    d.drift = {num(s, "reversion", sp), num(s, "k1_std", sp), num(s, "k2_std", sp),     num(s, "b_std", sp),
               num(s, "t1_std", sp),    num(s, "t2_std", sp), num(s, "readout_std", sp)};
    const json &r = field(j, "rng", path);
    d.rng_seed = unsigned_integer(r, "seed", path + ".rng");
    d.rng_draws = unsigned_integer(r, "draws", path + ".rng");
    d.clock_days = num(j, "clock_days", path);
    try {
        d.validate();
    } catch (const ConfigError &e) {
        throw SchemaError(path + ": " + e.what());
    }
    return d;
}

// ---------------------------------------------------------------------------------------
// LUT

inline json to_json(const ErrorFitParams &e) {
    json j{{"pair", e.pair.str()},
           {"k1", e.k1},
           {"k2", e.k2},
           {"b", e.b},
           {"residual_rms", e.residual_rms},
           {"clock_days", e.clock_days},
           {"n1", e.n1},
           {"n2", e.n2},
           {"shots", e.shots},
           {"ok", e.ok}};
    if (!e.ok) {
        j["failure"] = e.failure;
    }
    return j;
}

inline json to_json(const Lut &lut) {
    json entries = json::array();
    for (const auto &[_, e] : lut.entries) {
        entries.push_back(to_json(e));
    }
    return json{{"device_clock", lut.device_clock}, {"executions", lut.executions}, {"entries", entries}};
}

/// Parses a LUT and rejects entries whose pair is not in `geometry`'s coupling map.
inline Lut lut_from_json(const json &j, const DeviceGeometry &geometry, const std::string &path = "lut") {
    Lut lut;
    lut.device_clock = num(j, "device_clock", path);
    if (j.contains("executions")) {
        lut.executions = unsigned_integer(j, "executions", path);
    }
    const json &entries = array(j, "entries", path);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const std::string ep = path + ".entries[" + std::to_string(i) + "]";
        const json &je = entries[i];
        ErrorFitParams e;
        e.pair = parse_pair(str(je, "pair", ep), ep + ".pair");
        if (!geometry.has_pair(e.pair)) {
            throw SchemaError(ep + ".pair: " + e.pair.str() + " is not in the device coupling map");
        }
        e.k1 = num(je, "k1", ep);
        e.k2 = num(je, "k2", ep);
        e.b = num(je, "b", ep);
        e.residual_rms = num(je, "residual_rms", ep);
        e.clock_days = num_or(je, "clock_days", lut.device_clock, ep);
        e.n1 = static_cast<int>(integer(je, "n1", ep));
        e.n2 = static_cast<int>(integer(je, "n2", ep));
        e.shots = unsigned_integer(je, "shots", ep);
        e.ok = je.contains("ok") ? je["ok"].get<bool>() : true;
        if (je.contains("failure")) {
            e.failure = str(je, "failure", ep);
        }
        if (e.ok && (!(e.k1 > 0.0 && e.k1 <= kFitK1Max) || !(e.residual_rms >= 0.0))) {
            throw SchemaError(ep + ": k1 must lie in (0, 1.5] and residual_rms must be >= 0");
        }
        lut.entries[e.pair] = e;
    }
    return lut;
}

// ---------------------------------------------------------------------------------------
// Training artifacts

inline std::string trace_csv(const std::vector<TraceRow> &trace) {
    std::ostringstream out;
    out.precision(17);
    out << "iteration,task_loss,regu_loss,duration\n";
    for (const TraceRow &r : trace) {
        out << r.iteration << ',' << r.task_loss << ',' << r.regu_loss << ',';
        if (r.duration >= 0) {
            out << r.duration;
        }
        out << '\n';
    }
    return out.str();
}

inline std::string calibration_trace_csv(const CmaesResult &r) {
    std::ostringstream out;
    out.precision(17);
    out << "generation,best_in_generation,best_so_far,sigma,infeasible\n";
    for (const GenerationRecord &g : r.trace) {
        out << g.generation << ',' << g.best_in_generation << ',' << g.best_so_far << ',' << g.sigma << ','
            << g.infeasible << '\n';
    }
    return out.str();
}

}  // namespace qupad::io
