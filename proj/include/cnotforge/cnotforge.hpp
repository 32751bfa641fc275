// Copyright 2026 The cnotforge authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "cnotforge/circuit.hpp"
#include "cnotforge/cnf.hpp"
#include "cnotforge/coupling.hpp"
#include "cnotforge/gf2.hpp"
#include "cnotforge/oracle.hpp"
#include "cnotforge/pddl.hpp"
#include "cnotforge/peephole.hpp"
#include "cnotforge/plan.hpp"
#include "cnotforge/qbf_encode.hpp"
#include "cnotforge/sat_encode.hpp"
#include "cnotforge/sat_solver.hpp"
#include "cnotforge/solver.hpp"
