#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "byrdtd/error.hpp"
#include "byrdtd/mrp.hpp"

// File layout (whitespace separated, one matrix row per line):
//
//   byrdtd-mrp 1
//   states S
//   agents N
//   feature_dim D
//   discount g
//   initial      <S values>
//   transition   <S rows of S values>
//   rewards      N blocks of "agent n" followed by S rows of S values
//   features     <S rows of D values>
//   end

namespace byrdtd {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  for (Eigen::Index i = 0; i < row.size(); ++i) {
    if (i) out << ' ';
    out << format_double(row(i));
  }
  out << '\n';
}

class TokenReader {
 public:
  TokenReader(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back({tok, lineno});
    }
  }

  std::string word() {
    if (pos_ >= tokens_.size()) fail("unexpected end of file");
    return tokens_[pos_++].text;
  }

  void expect(const std::string& keyword) {
    const int line = current_line();
    const std::string got = word();
    if (got != keyword) fail_at(line, "expected '" + keyword + "', found '" + got + "'");
  }

  long integer() {
    const int line = current_line();
    const std::string tok = word();
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (errno != 0 || end == tok.c_str() || *end != '\0') fail_at(line, "expected integer, found '" + tok + "'");
    return v;
  }

  double real() {
    const int line = current_line();
    const std::string tok = word();
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') fail_at(line, "expected number, found '" + tok + "'");
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(current_line(), msg); }

  [[noreturn]] void fail_at(int line, const std::string& msg) const {
    throw Error(ErrorCode::ParseError, source_ + ":" + std::to_string(line) + ": " + msg);
  }

  int current_line() const {
    if (tokens_.empty()) return 0;
    return pos_ < tokens_.size() ? tokens_[pos_].line : tokens_.back().line;
  }

 private:
  struct Token {
    std::string text;
    int line;
  };
  std::string source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

MatrixXd read_matrix(TokenReader& r, Eigen::Index rows, Eigen::Index cols) {
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = r.real();
  return m;
}

}  // namespace

void write_model(std::ostream& out, const MrpModel& model) {
  const int S = model.num_states();
  out << "byrdtd-mrp 1\n";
  out << "states " << S << "\n";
  out << "agents " << model.num_agents() << "\n";
  out << "feature_dim " << model.feature_dim() << "\n";
  out << "discount " << format_double(model.discount()) << "\n";
  out << "initial\n";
  write_row(out, model.initial_dist().transpose());
  out << "transition\n";
  for (int s = 0; s < S; ++s) write_row(out, model.transition().row(s));
  out << "rewards\n";
  const auto rewards = model.reward_tensor();
  for (int n = 0; n < model.num_agents(); ++n) {
    out << "agent " << n << "\n";
    for (int s = 0; s < S; ++s) write_row(out, rewards[static_cast<std::size_t>(n)].row(s));
  }
  out << "features\n";
  for (int s = 0; s < S; ++s) write_row(out, model.features().row(s));
  out << "end\n";
}

MrpModel read_model(std::istream& in, const std::string& source_name) {
  TokenReader r(in, source_name);
  r.expect("byrdtd-mrp");
  if (r.integer() != 1) r.fail("unsupported model file version");
  r.expect("states");
  const long S = r.integer();
  if (S < 1 || S > kMaxStates) r.fail("state count out of range");
  r.expect("agents");
  const long N = r.integer();
  if (N < 1) r.fail("agent count must be positive");
  r.expect("feature_dim");
  const long D = r.integer();
  if (D < 1 || D > S) r.fail("feature dimension out of range");
  r.expect("discount");
  const double gamma = r.real();
  r.expect("initial");
  VectorXd initial = read_matrix(r, 1, S).transpose();
  r.expect("transition");
  MatrixXd transition = read_matrix(r, S, S);
  r.expect("rewards");
  std::vector<MatrixXd> rewards;
  for (long n = 0; n < N; ++n) {
    r.expect("agent");
    if (r.integer() != n) r.fail("reward blocks must be listed in agent order");
    rewards.push_back(read_matrix(r, S, S));
  }
  r.expect("features");
  MatrixXd features = read_matrix(r, S, D);
  r.expect("end");
  return MrpModel(std::move(transition), std::move(rewards), gamma, std::move(initial), std::move(features));
}

void save_model(const std::string& path, const MrpModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_model(out, model);
}

MrpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return read_model(in, path);
}

}  // namespace byrdtd
