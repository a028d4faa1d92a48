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

#include "qupad/ansatz.hpp"
#include "qupad/calibrator.hpp"
#include "qupad/circuit.hpp"
#include "qupad/cmaes.hpp"
#include "qupad/compiler.hpp"
#include "qupad/device.hpp"
#include "qupad/errors.hpp"
#include "qupad/geometry.hpp"
#include "qupad/gradient.hpp"
#include "qupad/lut.hpp"
#include "qupad/pulse.hpp"
#include "qupad/rng.hpp"
#include "qupad/statevector.hpp"
#include "qupad/trainer.hpp"
#include "qupad/unitary.hpp"
