/*
   Copyright 2026 The dysonqsd Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Library umbrella (the CLI headers under dysonqsd/cli/ additionally need
// nlohmann/json and OpenSSL).
#include "dysonqsd/collision.hpp"
#include "dysonqsd/errors.hpp"
#include "dysonqsd/integrator.hpp"
#include "dysonqsd/model.hpp"
#include "dysonqsd/noise.hpp"
#include "dysonqsd/oracles.hpp"
#include "dysonqsd/parallel.hpp"
#include "dysonqsd/qsd.hpp"
#include "dysonqsd/stats.hpp"
#include "dysonqsd/version.hpp"
