#include <doctest.h>

#include "chats/errors.hpp"
#include "chats/prompt.hpp"

using namespace chats;

TEST_CASE("built-in prompts satisfy their contracts") {
  const auto critic = PromptTemplate::builtin_critic();
  CHECK(critic.example_count() == 2);
  CHECK(critic.has_slot("table"));
  CHECK(critic.has_slot("claim"));
  CHECK_NOTHROW(require_critic_template(critic));
  const auto gen = PromptTemplate::builtin_generator();
  CHECK(gen.example_count() == 3);
  CHECK_NOTHROW(require_generator_template(gen));
  CHECK_THROWS_AS(require_critic_template(gen), TemplateError);
}

TEST_CASE("rendering slots and braces") {
  const PromptTemplate t("t", "Table: {table} {{literal}} Claim: {claim}");
  CHECK(t.render({{"table", "a | b"}, {"claim", "c"}}) == "Table: a | b {literal} Claim: c");
  CHECK_THROWS_AS(t.render({{"table", "x"}}), TemplateError);
  CHECK_THROWS_AS(PromptTemplate("u", "{unclosed").render({}), TemplateError);
  CHECK(t.example_count() == 0);
}
