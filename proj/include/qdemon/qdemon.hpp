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

#pragma once

#include "qdemon/errors.hpp"
#include "qdemon/qmatrix.hpp"
#include "qdemon/spins.hpp"
#include "qdemon/thermo.hpp"
#include "qdemon/engine.hpp"
#include "qdemon/program.hpp"
#include "qdemon/runner.hpp"
#include "qdemon/emit.hpp"
#include "qdemon/invariants.hpp"
