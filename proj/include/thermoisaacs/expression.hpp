#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

namespace thermoisaacs {

// Small arithmetic expression language for problem files.
//
// Grammar:  expr   := term (('+'|'-') term)*
//           term   := unary (('*'|'/') unary)*
//           unary  := ('+'|'-') unary | power
//           power  := atom ('^' unary)?
//           atom   := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
// Functions: sin cos exp tanh abs (one argument), min max (two arguments).
// Variable names are fixed at parse time and resolve to slot indices supplied
// by the caller at evaluation.
class Expression {
 public:
  Expression() = default;

  // Throws ParseError on syntax errors or unknown names.
  static Expression parse(const std::string& text,
                          const std::map<std::string, int>& variables);

  double eval(std::span<const double> slots) const;

  const std::string& text() const { return text_; }
  bool empty() const { return ops_.empty(); }

 private:
  enum class Op : int {
    Const, Var, Add, Sub, Mul, Div, Neg, Pow,
    Sin, Cos, Exp, Tanh, Abs, Min, Max,
  };
  struct Instr {
    Op op;
    int slot = 0;      // Var
    double value = 0;  // Const
  };

  std::string text_;
  std::vector<Instr> ops_;  // postfix program
  int max_slot_ = -1;

  friend class ExpressionParser;
};

}  // namespace thermoisaacs
