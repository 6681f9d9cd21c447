// Copyright 2026 The prbm authors
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

#include "prbm/chimera.hpp"
#include "prbm/config.hpp"
#include "prbm/constraints.hpp"
#include "prbm/dataset.hpp"
#include "prbm/eval.hpp"
#include "prbm/ising.hpp"
#include "prbm/matrix.hpp"
#include "prbm/model_io.hpp"
#include "prbm/pixel_map.hpp"
#include "prbm/rbm.hpp"
#include "prbm/rng.hpp"
#include "prbm/sampler.hpp"
#include "prbm/sweep.hpp"
#include "prbm/trainer.hpp"
