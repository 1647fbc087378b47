// Copyright 2026 The Oculogen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Umbrella header for the whole library.

#include "oculogen/annotate.hpp"
#include "oculogen/bvh.hpp"
#include "oculogen/config.hpp"
#include "oculogen/datagen.hpp"
#include "oculogen/error.hpp"
#include "oculogen/eye_texture.hpp"
#include "oculogen/eyeball.hpp"
#include "oculogen/eyeregion.hpp"
#include "oculogen/field.hpp"
#include "oculogen/geom.hpp"
#include "oculogen/image.hpp"
#include "oculogen/lighting.hpp"
#include "oculogen/material.hpp"
#include "oculogen/random.hpp"
#include "oculogen/rgbe.hpp"
#include "oculogen/staging.hpp"
#include "oculogen/tracer.hpp"
