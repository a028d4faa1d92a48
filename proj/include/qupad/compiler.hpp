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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qupad/circuit.hpp"
#include "qupad/errors.hpp"
#include "qupad/geometry.hpp"
#include "qupad/pulse.hpp"

namespace qupad {

/// Angles closer than this to zero (after wrapping) are treated as identity.
inline constexpr double kAngleEps = 1e-12;

/// Replaces every CX(c, t) by SX(t), Rzx(c, t; -pi/2), Rz(c; pi/2).
///
/// The three factors commute and multiply to CX up to a global phase. Other
/// gates and the parameter vector are left untouched.
inline Circuit rewrite_cnot_to_rzx(const Circuit &c) {
    Circuit out(c.n);
    out.params = c.params;
    for (const Gate &g : c.gates) {
        if (g.kind != GateKind::CX) {
            out.gates.push_back(g);
            continue;
        }
        const int ctl = g.qubits[0];
        const int tgt = g.qubits[1];
        out.sx(tgt);
        out.rzx(ctl, tgt, -kHalfPi);
        out.rz(ctl, kHalfPi);
    }
    return out;
}

/// Result of folding an Rzx angle into [-pi/2, pi/2].
struct NormalizedRzx {
    std::optional<double> beta;  // empty: no CR tone needed
    std::vector<Gate> corrections;
};

/// Rzx(theta) on (control, target) as Rzx(beta) with |beta| <= pi/2 followed by single-qubit
/// corrections, up to global phase. For |theta| > pi/2, Rzx(theta) = Rzx(beta) (Z x X) with
/// beta = theta - sign(theta) pi, and Z is a virtual Rz(pi). theta = 0 and theta = +-pi need
/// no CR tone at all.
inline NormalizedRzx normalize_rzx_angle(double theta, int control, int target) {
    NormalizedRzx out;
    const double t = wrap_angle(theta);
    if (std::abs(t) < kAngleEps) {
        return out;
    }
    if (std::abs(t) <= kHalfPi + kAngleEps) {
        out.beta = std::clamp(t, -kHalfPi, kHalfPi);
        return out;
    }
    const double beta = t - std::copysign(kPi, t);
    if (std::abs(beta) >= kAngleEps) {
        out.beta = beta;
    }
    out.corrections.push_back(Gate{GateKind::Rz, {control}, Param::constant(kPi)});
    out.corrections.push_back(Gate{GateKind::X, {target}, {}});
    return out;
}

/// Binds every parameter to a constant and folds Rzx angles with normalize_rzx_angle.
/// The result has no trainable parameters. `elided` counts Rzx gates that vanished.
inline Circuit normalize_rzx_gates(const Circuit &c, std::size_t *elided = nullptr) {
    c.validate();
    Circuit out(c.n);
    std::size_t dropped = 0;
    for (const Gate &g : c.gates) {
        const double v = g.param.resolve(c.params);
        if (g.kind != GateKind::Rzx) {
            out.gates.push_back(Gate{g.kind, g.qubits, Param::constant(v)});
            continue;
        }
        NormalizedRzx nz = normalize_rzx_angle(v, g.qubits[0], g.qubits[1]);
        if (nz.beta) {
            out.rzx(g.qubits[0], g.qubits[1], *nz.beta);
        } else {
            ++dropped;
        }
        for (Gate &corr : nz.corrections) {
            out.gates.push_back(std::move(corr));
        }
    }
    if (elided != nullptr) {
        *elided = dropped;
    }
    return out;
}

/// Pulse program for a circuit plus bookkeeping.
struct CompiledProgram {
    Circuit circuit;            // gate-level program that the schedule realizes
    PulseSchedule schedule;
    std::vector<std::vector<std::size_t>> provenance;  // gate index -> instruction indices
    std::map<QubitPair, std::int64_t> exposure;        // CR ticks overlapped by pulses elsewhere
    DsrAssignment dsr;
    std::size_t elided_rzx = 0;

    std::int64_t duration() const { return schedule.total_duration; }
};

/// Cross-resonance tone realizing Rzx(beta) on `pair` at the given stretch.
inline GaussianSquarePulse cr_tone(double beta, double stretch, const GaussianSquarePulse &base) {
    GaussianSquarePulse p = stretch_pulse(rzx_base_pulse(std::abs(beta), base), stretch);
    if (beta < 0.0) {
        p.phase = wrap_angle(p.phase + kPi);
    }
    return p;
}

namespace detail {

inline void record_exposure(CompiledProgram &prog) {
    const auto &ins = prog.schedule.instructions;
    auto qubits_of = [](const Channel &ch) {
        return ch.kind == Channel::Kind::Drive ? std::vector<int>{ch.qubit} : std::vector<int>{ch.qubit, ch.target};
    };
    for (std::size_t i = 0; i < ins.size(); ++i) {
        if (ins[i].channel.kind != Channel::Kind::Control) {
            continue;
        }
        const QubitPair pair{ins[i].channel.qubit, ins[i].channel.target};
        std::int64_t &acc = prog.exposure[pair];
        const auto mine = qubits_of(ins[i].channel);
        for (std::size_t j = 0; j < ins.size(); ++j) {
            if (j == i) {
                continue;
            }
            const auto theirs = qubits_of(ins[j].channel);
            const bool shares = std::any_of(theirs.begin(), theirs.end(), [&](int q) {
                return std::find(mine.begin(), mine.end(), q) != mine.end();
            });
            if (shares) {
                continue;
            }
            const std::int64_t lo = std::max(ins[i].start, ins[j].start);
            const std::int64_t hi = std::min(ins[i].end(), ins[j].end());
            acc += std::max<std::int64_t>(0, hi - lo);
        }
    }
}

// ASAP list scheduling shared by both bases. CX is only accepted when `allow_cx` is set.
inline CompiledProgram schedule(const Circuit &c, const DsrAssignment &dsr, const DeviceGeometry &dev, bool allow_cx) {
    c.validate();
    if (c.n > dev.n) {
        throw ConfigError("circuit needs " + std::to_string(c.n) + " qubits, device has " + std::to_string(dev.n));
    }
    CompiledProgram prog;
    prog.circuit = c;
    prog.dsr = dsr;
    prog.provenance.resize(c.gates.size());
    std::vector<std::int64_t> free_at(static_cast<std::size_t>(c.n), 0);
    auto at = [&](int q) -> std::int64_t & { return free_at[static_cast<std::size_t>(q)]; };

    auto emit_sq = [&](std::size_t k, int q, std::string label) {
        PulseInstruction inst{Channel::drive(q), at(q), SqPulse{std::move(label), dev.sq_duration}};
        at(q) = inst.end();
        prog.provenance[k].push_back(prog.schedule.add(std::move(inst)));
    };
    auto emit_cr = [&](std::size_t k, QubitPair pair, GaussianSquarePulse pulse) {
        const std::int64_t start = std::max(at(pair.control), at(pair.target));
        PulseInstruction inst{Channel::control(pair), start, pulse};
        at(pair.control) = at(pair.target) = inst.end();
        prog.provenance[k].push_back(prog.schedule.add(std::move(inst)));
    };

    for (std::size_t k = 0; k < c.gates.size(); ++k) {
        const Gate &g = c.gates[k];
        if (g.kind == GateKind::Rz || g.kind == GateKind::Measure) {
            continue;
        }
        if (is_physical_single(g.kind)) {
            emit_sq(k, g.qubits[0], std::string(gate_name(g.kind)));
            continue;
        }
        const QubitPair pair = g.pair();
        const GaussianSquarePulse &base = dev.cr_pulse(pair);
        if (g.kind == GateKind::CX) {
            if (!allow_cx) {
                throw ContractViolation("CX left in a circuit scheduled in the Rzx basis");
            }
            // Echoed CNOT: pre-rotation on the target, two CR tones of opposite phase
            // separated and followed by X on the control.
            const GaussianSquarePulse tone = stretch_pulse(base, 1.0);
            GaussianSquarePulse flipped = tone;
            flipped.phase = wrap_angle(tone.phase + kPi);
            const std::int64_t t0 = std::max(at(pair.control), at(pair.target));
            at(pair.control) = at(pair.target) = t0;
            emit_sq(k, pair.target, "cx_pre");
            at(pair.control) = at(pair.target);
            emit_cr(k, pair, tone);
            emit_sq(k, pair.control, "cx_echo");
            at(pair.target) = at(pair.control);
            emit_cr(k, pair, flipped);
            emit_sq(k, pair.control, "cx_echo");
            at(pair.target) = at(pair.control);
            continue;
        }
        const double beta = g.param.resolve(c.params);
        if (std::abs(beta) > kHalfPi + kAngleEps) {
            throw ContractViolation("Rzx angle " + std::to_string(beta) + " is outside [-pi/2, pi/2]; normalize first");
        }
        if (std::abs(beta) < kAngleEps) {
            continue;
        }
        auto it = dsr.find(pair);
        if (it == dsr.end()) {
            throw ConfigError("no dsr assigned to pair " + pair.str());
        }
        emit_cr(k, pair, cr_tone(beta, it->second.value(), base));
    }
    record_exposure(prog);
    return prog;
}

}  // namespace detail

/// ASAP schedule of an Rzx-basis circuit: each gate starts once all its qubits are free.
/// Rz and Measure take no time; physical single-qubit gates take dev.sq_duration; Rzx(beta)
/// is one CR tone on the pair's control channel, sized by area and stretched by the pair's dsr.
inline CompiledProgram schedule_asap(const Circuit &c, const DsrAssignment &dsr, const DeviceGeometry &dev) {
    return detail::schedule(c, dsr, dev, false);
}

/// Full Rzx-basis compilation: CX rewrite, angle normalization, then ASAP scheduling.
inline CompiledProgram compile_rzx(const Circuit &c, const DsrAssignment &dsr, const DeviceGeometry &dev) {
    std::size_t elided = 0;
    const Circuit rzx = normalize_rzx_gates(rewrite_cnot_to_rzx(c), &elided);
    CompiledProgram prog = schedule_asap(rzx, dsr, dev);
    prog.elided_rzx = elided;
    return prog;
}

/// Same circuit with every Rzx-using pair at dsr = 1.
inline CompiledProgram compile_rzx_nominal(const Circuit &c, const DeviceGeometry &dev) {
    return compile_rzx(c, uniform_dsr(c.pairs_used(), 1.0), dev);
}

/// Schedule in the CNOT basis with echoed CX gates, for comparison against the Rzx basis.
/// Input must contain no Rzx gates.
inline CompiledProgram schedule_cnot_basis(const Circuit &c, const DeviceGeometry &dev) {
    for (const Gate &g : c.gates) {
        if (g.kind == GateKind::Rzx) {
            throw ContractViolation("schedule_cnot_basis takes circuits without Rzx gates");
        }
    }
    Circuit bound(c.n);
    for (const Gate &g : c.gates) {
        bound.gates.push_back(Gate{g.kind, g.qubits, Param::constant(g.param.resolve(c.params))});
    }
    return detail::schedule(bound, {}, dev, true);
}

/// Sum of the per-gate durations, i.e. the schedule length with no parallelism.
inline std::int64_t serial_duration(const CompiledProgram &prog) {
    std::int64_t total = 0;
    for (const auto &inst : prog.schedule.instructions) {
        total += inst.duration();
    }
    return total;
}

}  // namespace qupad
