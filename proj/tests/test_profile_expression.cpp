#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "echoform/profile_expression.hpp"

using namespace echoform;
using Catch::Approx;

TEST_CASE("profile expressions evaluate with the expected precedence", "[parser]") {
    const auto e = ProfileExpression::parse("2+0.5*sin(t)+0.2*sin(5*t)");
    CHECK(e.eval(pi / 2) == Approx(2.5 + 0.2 * std::sin(5.0 * pi / 2.0)).epsilon(1e-15));
    CHECK(e.eval(0.0) == Approx(2.0).epsilon(1e-15));

    CHECK(ProfileExpression::parse("1").eval(0.37) == 1.0);
    CHECK(ProfileExpression::parse("-2*-3").eval(0.0) == Approx(6.0));
    CHECK(ProfileExpression::parse("2-1-1").eval(0.0) == Approx(0.0));         // left assoc
    CHECK(ProfileExpression::parse("2+3*4").eval(0.0) == Approx(14.0));        // * binds tighter
    CHECK(ProfileExpression::parse("-(1+2)*2").eval(0.0) == Approx(-6.0));
    CHECK(ProfileExpression::parse("cos(t)*cos(t)+sin(t)*sin(t)").eval(1.234) ==
          Approx(1.0).epsilon(1e-15));
    CHECK(ProfileExpression::parse(" 1 + 0.1 * sin( t ) ").eval(0.5) ==
          Approx(1.0 + 0.1 * std::sin(0.5)).epsilon(1e-15));
}

TEST_CASE("syntax errors carry the byte offset", "[parser]") {
    try {
        ProfileExpression::parse("2+*3");
        FAIL("expected a syntax error");
    } catch (const ProfileSyntaxError& err) {
        CHECK(err.offset == 2);
    }
    CHECK_THROWS_AS(ProfileExpression::parse("sin 3"), ProfileSyntaxError);
    CHECK_THROWS_AS(ProfileExpression::parse("2+"), ProfileSyntaxError);
    CHECK_THROWS_AS(ProfileExpression::parse("(1+2"), ProfileSyntaxError);
    CHECK_THROWS_AS(ProfileExpression::parse("1+2)"), ProfileSyntaxError);
    CHECK_THROWS_AS(ProfileExpression::parse("tan(t)"), ProfileSyntaxError);
    CHECK_THROWS_AS(ProfileExpression::parse(""), ProfileSyntaxError);
}

TEST_CASE("positivity is enforced when building a profile", "[parser]") {
    CHECK_THROWS_WITH(ProfileExpression::parse("sin(t)").to_profile(),
                      Catch::Matchers::ContainsSubstring("nonpositive"));
    const auto p = ProfileExpression::parse("1+0.1*sin(t)").to_profile();
    CHECK(p(0.25) == Approx(1.0 + 0.1 * std::sin(0.25)).epsilon(1e-15));
}

TEST_CASE("pretty print round trips", "[parser]") {
    const char* cases[] = {"2+0.5*sin(t)+0.2*sin(5*t)", "-(t*t-3)*cos(2*t)+4",
                           "1+0.1*sin(t)", "cos(sin(t))*2-0.25"};
    std::mt19937 gen(5);
    std::uniform_real_distribution<double> ts(-pi, pi);
    for (const char* text : cases) {
        const auto a = ProfileExpression::parse(text);
        const auto b = ProfileExpression::parse(a.pretty());
        for (int i = 0; i < 1024; ++i) {
            const double t = ts(gen);
            CHECK(a.eval(t) == Approx(b.eval(t)).margin(1e-15));
        }
    }
}
