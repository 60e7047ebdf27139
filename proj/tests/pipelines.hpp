// Copyright 2026 The teleamp Authors
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

// Random linear-optics pipelines run through both engines.

#pragma once

#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "teleamp/teleamp.hpp"

namespace teleamp::testing {

struct OpBeamSplitter {
    BeamSplitter bs;
};
struct OpPhase {
    std::size_t mode;
    double phase;
};
struct OpLoss {
    std::size_t mode;
    double R;
};
using Op = std::variant<OpBeamSplitter, OpPhase, OpLoss>;

struct Pipeline {
    std::vector<CoherentBranchState> inputs;  // one single-mode state per mode
    std::vector<Op> ops;
    std::optional<ClickPattern> herald;  // applied at the end
    std::string describe;
};

inline Pipeline random_pipeline(std::mt19937_64 &rng) {
    std::uniform_int_distribution<int> modes_d(1, 3), ops_d(1, 5), kind_d(0, 2), input_d(0, 2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Pipeline p;
    const std::size_t modes = static_cast<std::size_t>(modes_d(rng));
    for (std::size_t m = 0; m < modes; ++m) {
        const Complex a = std::polar(0.6 * u(rng), 2.0 * std::numbers::pi * u(rng));
        switch (input_d(rng)) {
            case 0: p.inputs.push_back(CoherentBranchState::product({a})); p.describe += "coh "; break;
            case 1: p.inputs.push_back(cat_branches(a + 0.1, Parity::Odd)); p.describe += "odd "; break;
            default: p.inputs.push_back(cat_branches(a, Parity::Even)); p.describe += "even "; break;
        }
    }
    const int n_ops = ops_d(rng);
    for (int i = 0; i < n_ops; ++i) {
        int kind = kind_d(rng);
        if (kind == 0 && modes < 2) {
            kind = 1;
        }
        if (kind == 0) {
            std::size_t a = rng() % modes;
            std::size_t b = (a + 1 + rng() % (modes - 1)) % modes;
            p.ops.push_back(OpBeamSplitter{{0.05 + 0.9 * u(rng), a, b}});
            p.describe += "bs ";
        } else if (kind == 1) {
            p.ops.push_back(OpPhase{rng() % modes, 2.0 * std::numbers::pi * u(rng)});
            p.describe += "ph ";
        } else {
            p.ops.push_back(OpLoss{rng() % modes, 0.9 * u(rng)});
            p.describe += "loss ";
        }
    }
    if (modes >= 2 && u(rng) < 0.5) {
        const DetectorModel d{1e-3 * u(rng), 0.2 + 0.8 * u(rng)};
        p.herald = ClickPattern({{"D", modes - 1, u(rng) < 0.5 ? Outcome::On : Outcome::Off, d}});
        p.describe += "herald";
    }
    return p;
}

struct EngineComparison {
    double agreement = 0.0;
    double probability_gap = 0.0;
};

inline EngineComparison compare_engines(const Pipeline &p) {
    const std::size_t modes = p.inputs.size();
    CoherentBranchState psi = p.inputs[0];
    for (std::size_t m = 1; m < modes; ++m) {
        psi = psi.tensor(p.inputs[m]);
    }
    // Enough levels for the total energy at any point of the pipeline.
    double energy = 0.0;
    for (const auto &in : p.inputs) {
        double e = 0.0;
        for (const auto &b : in.branches()) {
            e = std::max(e, std::norm(b.amplitudes[0]));
        }
        energy += e;
    }
    const std::size_t N = default_cutoff(std::sqrt(energy));
    FockEnsemble rho = FockEnsemble::pure(to_fock(psi, std::vector<std::size_t>(modes, N)));
    for (const Op &op : p.ops) {
        if (const auto *b = std::get_if<OpBeamSplitter>(&op)) {
            psi = apply_beamsplitter(psi, b->bs);
            rho = apply_beamsplitter(rho, b->bs);
        } else if (const auto *ph = std::get_if<OpPhase>(&op)) {
            psi = apply_phase(psi, ph->mode, ph->phase);
            rho = apply_phase(rho, ph->mode, ph->phase);
        } else {
            const auto &l = std::get<OpLoss>(op);
            psi = loss_channel(psi, l.mode, l.R);
            rho = loss_channel(rho, l.mode, l.R);
        }
    }
    std::vector<std::size_t> keep(modes);
    std::iota(keep.begin(), keep.end(), 0);
    BranchMixture mix = partial_trace(psi, keep);
    double pb = 1.0, pf = 1.0;
    if (p.herald) {
        const auto cb = condition(mix, *p.herald);
        const auto cf = condition(rho, *p.herald);
        mix = cb.state;
        rho = cf.state;
        pb = cb.probability;
        pf = cf.probability;
    }
    std::vector<std::size_t> cut(mix.mode_count(), N);
    return {state_agreement(to_fock(mix, cut), rho.normalized()), std::abs(pb - pf)};
}

}  // namespace teleamp::testing
