// SPDX-License-Identifier: Apache-2.0
//
// gia-sim: grouping-based interference alignment for multi-cell MIMO uplinks
// Copyright (C) 2026 The gia-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef GIA_GIA_HPP
#define GIA_GIA_HPP

#include <gia/assignment.hpp>
#include <gia/cell_assignment.hpp>
#include <gia/errors.hpp>
#include <gia/feedback.hpp>
#include <gia/harness.hpp>
#include <gia/matrix.hpp>
#include <gia/random.hpp>
#include <gia/system.hpp>
#include <gia/transceiver.hpp>

#endif
