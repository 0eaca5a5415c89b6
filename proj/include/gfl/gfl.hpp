/*
Copyright 2026 The gfl Authors.

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

#include "gfl/adam.hpp"
#include "gfl/barcode.hpp"
#include "gfl/checkpoint.hpp"
#include "gfl/error.hpp"
#include "gfl/filtration.hpp"
#include "gfl/folds.hpp"
#include "gfl/graph.hpp"
#include "gfl/model.hpp"
#include "gfl/nn.hpp"
#include "gfl/persistence.hpp"
#include "gfl/rng.hpp"
#include "gfl/synthetic.hpp"
#include "gfl/trainer.hpp"
#include "gfl/tu_format.hpp"
#include "gfl/vectorization.hpp"
