#include "l2x/errors.hpp"
#include "l2x/keypath.hpp"

#include <doctest.h>

using namespace l2x;
using keypath::Json;

TEST_CASE("split and join are inverse") {
  CHECK(keypath::split("a.b.0") == std::vector<std::string>{"a", "b", "0"});
  CHECK(keypath::join({"a", "b", "0"}) == "a.b.0");
}

TEST_CASE("prefix is segment-wise") {
  CHECK(keypath::is_prefix("objects", "objects.tree1"));
  CHECK(keypath::is_prefix("objects.tree1", "objects.tree1"));
  CHECK_FALSE(keypath::is_prefix("objects.tree", "objects.tree1"));
  CHECK_FALSE(keypath::is_prefix("objects.tree1.color", "objects.tree1"));
}

TEST_CASE("find walks objects, ids and indices") {
  const Json doc = Json::parse(R"({"objects":[{"id":"7","v":1},{"id":"x","v":2}],"p":[3,4]})");
  CHECK(*keypath::find(doc, "objects.x.v") == 2);
  // ids win over indices when both could match
  CHECK(*keypath::find(doc, "objects.7.v") == 1);
  CHECK(*keypath::find(doc, "objects.1.v") == 2);
  CHECK(*keypath::find(doc, "p.1") == 4);
  CHECK(keypath::find(doc, "objects.nope") == nullptr);
  CHECK(keypath::find(doc, "p.2") == nullptr);
  CHECK(keypath::find(doc, "p.1.deeper") == nullptr);
}

TEST_CASE("assign replaces, appends and removes") {
  Json doc = Json::parse(R"({"objects":[{"id":"a"},{"id":"b"}],"n":1})");
  keypath::assign(doc, "n", 2);
  CHECK(doc["n"] == 2);
  keypath::assign(doc, "objects.+", Json{{"id", "c"}});
  CHECK(doc["objects"].size() == 3);
  keypath::assign(doc, "objects.a", nullptr);
  CHECK(doc["objects"][0]["id"] == "b");
  CHECK_THROWS_AS(keypath::assign(doc, "missing", 1), UnknownPath);
  CHECK_THROWS_AS(keypath::assign(doc, "objects.+.id", 1), UnknownPath);
  CHECK_THROWS_AS(keypath::assign(doc, "n.deeper", 1), UnknownPath);
}
