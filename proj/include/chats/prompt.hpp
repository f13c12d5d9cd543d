#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace chats {

// Plain-text prompt with named slots written as {name}; "{{" and "}}" are
// literal braces. Worked examples are introduced by lines starting with
// "### Example".
class PromptTemplate {
 public:
  PromptTemplate(std::string id, std::string text);

  static PromptTemplate from_file(const std::filesystem::path& path);
  static PromptTemplate builtin_critic();     // 2-shot chain-of-thought verdicts
  static PromptTemplate builtin_generator();  // 3-shot summary writing

  const std::string& id() const { return id_; }
  const std::string& text() const { return text_; }

  std::size_t example_count() const;
  bool has_slot(std::string_view name) const;

  // Throws TemplateError on unknown or missing slots.
  std::string render(const std::map<std::string, std::string>& values) const;

 private:
  std::string id_;
  std::string text_;
};

// Throws TemplateError unless the template has {table} and {claim} and exactly
// two worked examples.
void require_critic_template(const PromptTemplate& t);
// Throws TemplateError unless the template has {table} and exactly three examples.
void require_generator_template(const PromptTemplate& t);

}  // namespace chats
