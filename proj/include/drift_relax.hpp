// Copyright 2026 The drift_relax Authors
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

#ifndef DRIFT_RELAX_DRIFT_RELAX_HPP
#define DRIFT_RELAX_DRIFT_RELAX_HPP

#include "drift_relax/random.hpp"
#include "drift_relax/sde.hpp"
#include "drift_relax/conditional_sampler.hpp"
#include "drift_relax/particle_filter.hpp"

#endif  // DRIFT_RELAX_DRIFT_RELAX_HPP
