// Copyright 2026 The qdemon Authors
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

// Library usage: run the swap stage and a Carnot cycle, and print the
// simulated work next to the closed forms.

#include <cstdio>

#include "qdemon/qdemon.hpp"

int main() {
    using namespace qdemon;

    SpinParams p;
    p.mu1 = 2.0;
    p.mu2 = 1.0;
    p.T1 = 8.0;
    p.T2 = 1.0;
    const CycleOutcome swap = run_swap_stage(p);
    std::printf("swap:   W = %.15f  closed form %.15f\n", swap.simulated_W, swap.closed_form_W);
    for (const auto &e : swap.ledger.steps()) {
        std::printf("  %-24s work %+.6f\n", e.label.c_str(), e.work_on_field);
    }

    const SpinParams c{.mu1 = 1.0, .mu2 = 1.5, .B = 1.0, .gamma = 1.0, .T1 = 2.0, .T2 = 1.0};
    const CycleOutcome carnot = run_carnot_cycle(c, 10000);
    std::printf("carnot: W = %.9f  closed form %.9f  efficiency %.6f (bound %.6f)\n", carnot.simulated_W,
                carnot.closed_form_W, carnot.efficiency, carnot.efficiency_bound);

    const auto t = carnot.ledger.totals();
    std::printf("        Q_in %.9f  Q_out %.9f  dS_total %.3e\n", t.Q_in, t.Q_out, t.dS_total);
    return 0;
}
