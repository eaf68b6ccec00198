/* Copyright 2026 The VISOR Toolkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef VISOR_SRC_PROMPT_JSON_H_
#define VISOR_SRC_PROMPT_JSON_H_

#include <cstddef>

#include "json.hpp"
#include "visor/sr2d.h"

namespace visor {

// Writes text, object_a, object_b, relation, variant and attributes.
void AppendPromptFields(const Prompt& prompt, nlohmann::ordered_json& record);

// Reads the fields written by AppendPromptFields plus the id under `id_field`.
// Throws ParseError naming `line_no`.
Prompt PromptFromJson(const nlohmann::ordered_json& record, std::size_t line_no,
                      const Vocabulary& vocabulary, const char* id_field);

}  // namespace visor

#endif  // VISOR_SRC_PROMPT_JSON_H_
