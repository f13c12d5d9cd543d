#include "chats/prompt.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "chats/errors.hpp"
#include "chats/text.hpp"
#include "prompt_assets.hpp"

namespace chats {

PromptTemplate::PromptTemplate(std::string id, std::string text)
    : id_(std::move(id)), text_(std::move(text)) {}

PromptTemplate PromptTemplate::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TemplateError("cannot read prompt template " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return PromptTemplate(path.stem().string(), ss.str());
}

PromptTemplate PromptTemplate::builtin_critic() {
  return PromptTemplate(std::string(assets::kCriticTemplateId), std::string(assets::kCriticTemplate));
}

PromptTemplate PromptTemplate::builtin_generator() {
  return PromptTemplate(std::string(assets::kGeneratorTemplateId),
                        std::string(assets::kGeneratorTemplate));
}

std::size_t PromptTemplate::example_count() const {
  std::size_t n = 0;
  for (auto line : split_lines(text_))
    if (line.starts_with("### Example")) ++n;
  return n;
}

namespace {

// Calls on_text for literal runs and on_slot for each {name}.
template <typename OnText, typename OnSlot>
void scan(std::string_view text, OnText on_text, OnSlot on_slot) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (text.substr(i, 2) == "{{") {
      on_text("{");
      i += 2;
    } else if (text.substr(i, 2) == "}}") {
      on_text("}");
      i += 2;
    } else if (text[i] == '{') {
      const auto close = text.find('}', i);
      if (close == std::string_view::npos) throw TemplateError("unterminated slot in prompt template");
      on_slot(text.substr(i + 1, close - i - 1));
      i = close + 1;
    } else {
      const auto next = text.find_first_of("{}", i);
      const auto stop = next == std::string_view::npos ? text.size() : next;
      if (stop == i) {  // lone '}'
        on_text(text.substr(i, 1));
        ++i;
      } else {
        on_text(text.substr(i, stop - i));
        i = stop;
      }
    }
  }
}

}  // namespace

bool PromptTemplate::has_slot(std::string_view name) const {
  bool found = false;
  scan(text_, [](std::string_view) {}, [&](std::string_view slot) { found = found || slot == name; });
  return found;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
  std::string out;
  out.reserve(text_.size() + 256);
  scan(
      text_, [&](std::string_view t) { out += t; },
      [&](std::string_view slot) {
        auto it = values.find(std::string(slot));
        if (it == values.end())
          throw TemplateError("no value for slot {" + std::string(slot) + "} in " + id_);
        out += it->second;
      });
  return out;
}

void require_critic_template(const PromptTemplate& t) {
  if (!t.has_slot("table") || !t.has_slot("claim"))
    throw TemplateError(t.id() + ": critic template needs {table} and {claim} slots");
  if (t.example_count() != 2)
    throw TemplateError(t.id() + ": critic template must contain exactly 2 worked examples, found " +
                        std::to_string(t.example_count()));
}

void require_generator_template(const PromptTemplate& t) {
  if (!t.has_slot("table"))
    throw TemplateError(t.id() + ": generator template needs a {table} slot");
  if (t.example_count() != 3)
    throw TemplateError(t.id() + ": generator template must contain exactly 3 worked examples, found " +
                        std::to_string(t.example_count()));
}

}  // namespace chats
