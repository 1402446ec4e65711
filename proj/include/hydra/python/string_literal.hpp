#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "hydra/python/ast.hpp"

namespace hydra::python {

/// Value of one string-literal token (prefix and quotes included), as UTF-8.
/// Returns nullopt for bytes and f-string literals.
std::optional<std::string> evaluate_string_literal(std::string_view token_text);

/// Same cleanup as Python's `inspect.cleandoc`.
std::string cleandoc(std::string_view doc);

/// Docstring of a body Group: its first statement when that statement is a
/// plain string expression. Already cleaned.
std::optional<std::string> docstring_of(const Node& body);

}  // namespace hydra::python
