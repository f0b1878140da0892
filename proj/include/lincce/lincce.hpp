// Copyright 2026 The lincce Authors.
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

#ifndef LINCCE_LINCCE_HPP
#define LINCCE_LINCCE_HPP

#include "lincce/coreset.hpp"
#include "lincce/errors.hpp"
#include "lincce/experiment.hpp"
#include "lincce/features.hpp"
#include "lincce/ftrl.hpp"
#include "lincce/game.hpp"
#include "lincce/generators.hpp"
#include "lincce/io.hpp"
#include "lincce/oracle.hpp"
#include "lincce/random.hpp"
#include "lincce/random_access.hpp"
#include "lincce/simulator.hpp"

#endif  // LINCCE_LINCCE_HPP
