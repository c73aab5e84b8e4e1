// Copyright 2026 The PRW Authors.
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

#ifndef PRW_TOOLS_REPORT_JSON_HPP_
#define PRW_TOOLS_REPORT_JSON_HPP_

#include <json.hpp>

#include "prw/irbbs.hpp"
#include "prw/realm.hpp"

namespace prw::report {

nlohmann::json matrix_json(const Matrix& m);
nlohmann::json trace_json(const std::vector<IrbbsTraceEntry>& trace);
nlohmann::json certificate_json(const Certificate& c);
nlohmann::json history_json(const std::vector<RealmIteration>& h);

}  // namespace prw::report

#endif  // PRW_TOOLS_REPORT_JSON_HPP_
