// Copyright 2026 The noonsim Authors
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

// Umbrella header for the noonsim library.

#pragma once

#include "noonsim/background.hpp"
#include "noonsim/circuit.hpp"
#include "noonsim/construction.hpp"
#include "noonsim/detection.hpp"
#include "noonsim/elements.hpp"
#include "noonsim/experiment.hpp"
#include "noonsim/fock.hpp"
#include "noonsim/harmonics.hpp"
#include "noonsim/serialization.hpp"
