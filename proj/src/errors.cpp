#include "tiedpools/errors.hpp"

namespace tiedpools {

namespace {
std::string describe(const std::vector<std::vector<std::string>>& components) {
  std::string out = "comparison graph is disconnected (" + std::to_string(components.size()) +
                    " components):";
  for (const auto& group : components) {
    out += " {";
    for (std::size_t i = 0; i < group.size(); ++i) {
      if (i > 0) out += ", ";
      out += group[i];
    }
    out += "}";
  }
  return out;
}

std::string locate(const std::string& source, std::size_t line, std::size_t column,
                   const std::string& message) {
  std::string out = source;
  if (line > 0) {
    out += ":" + std::to_string(line);
    if (column > 0) out += ":" + std::to_string(column);
  }
  return out + ": " + message;
}
}  // namespace

DisconnectedError::DisconnectedError(std::vector<std::vector<std::string>> components)
    : ValidationError(describe(components)), components_(std::move(components)) {}

ParseError::ParseError(std::string source, std::size_t line, std::size_t column,
                       const std::string& message)
    : std::runtime_error(locate(source, line, column, message)),
      source_(std::move(source)),
      line_(line),
      column_(column) {}

}  // namespace tiedpools
