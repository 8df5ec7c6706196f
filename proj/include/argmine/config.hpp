// Copyright 2026 The argmine Authors.
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

// Reflection helpers for plain config structs. A config exposes
// `template <class F> void visit(F&& f)` calling f(name, field) per field.

#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "argmine/common.hpp"
#include "json.hpp"

namespace argmine {

class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <typename T>
void parse_value(const std::string& key, const std::string& text, T& out) {
  try {
    std::size_t used = 0;
    if constexpr (std::is_same_v<T, double>) {
      out = std::stod(text, &used);
    } else if constexpr (std::is_same_v<T, bool>) {
      if (text == "true" || text == "1") {
        out = true;
      } else if (text == "false" || text == "0") {
        out = false;
      } else {
        throw std::invalid_argument(text);
      }
      used = text.size();
    } else if constexpr (std::is_integral_v<T>) {
      if (!text.empty() && text[0] == '-') throw std::invalid_argument(text);
      out = static_cast<T>(std::stoull(text, &used));
    } else if constexpr (std::is_same_v<T, std::string>) {
      out = text;
      used = text.size();
    } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
      out.clear();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
      used = text.size();
    }
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::logic_error&) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
}

}  // namespace detail

template <typename Config>
nlohmann::json config_to_json(Config c) {
  nlohmann::json j = nlohmann::json::object();
  c.visit([&](const char* name, auto& v) { j[name] = v; });
  return j;
}

template <typename Config>
Config config_from_json(const nlohmann::json& j) {
  Config c;
  c.visit([&](const char* name, auto& v) {
    if (j.contains(name)) j.at(name).get_to(v);
  });
  return c;
}

// Sets one field from its text form; returns false for unknown keys.
template <typename Config>
bool config_set(Config& c, const std::string& key, const std::string& value) {
  bool found = false;
  c.visit([&](const char* name, auto& v) {
    if (key == name) {
      detail::parse_value(key, value, v);
      found = true;
    }
  });
  return found;
}

// One `name = value` per line; the result lists every field.
template <typename Config>
std::string config_dump(Config c, const std::string& prefix) {
  std::ostringstream out;
  c.visit([&](const char* name, auto& v) { out << prefix << name << " = " << nlohmann::json(v).dump() << '\n'; });
  return out.str();
}

// Parses `key = value` lines. Blank lines and lines starting with '#' are
// skipped. A value written as a JSON string or list (the form config_dump
// prints) is unwrapped to the plain text config_set expects.
inline std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text,
                                                                         const std::string& what = "config") {
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(what + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(what + ":" + std::to_string(line_no) + ": empty key");
    if (!value.empty() && (value.front() == '"' || value.front() == '[')) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(value);
      } catch (const nlohmann::json::exception&) {
        throw ConfigError(what + ":" + std::to_string(line_no) + ": malformed value " + value);
      }
      if (j.is_string()) {
        value = j.get<std::string>();
      } else {
        value.clear();
        for (const auto& item : j) {
          if (!value.empty()) value += ',';
          value += item.is_string() ? item.get<std::string>() : item.dump();
        }
      }
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

}  // namespace argmine
