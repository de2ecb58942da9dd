#include "infoagg/prompt.hpp"

#include <cctype>
#include <cmath>

#include <fmt/format.h>

namespace infoagg {

namespace {

constexpr std::string_view kQuestion =
    "Will Company X post next quarter profits that exceed 1 million?";

constexpr std::string_view kMyopicObjective =
    "Use reasoning to determine your belief q, then choose your action (Buy, Sell, or Hold: Yes "
    "and No shares). Maximize your expected payoff in this round only, based on your belief q and "
    "the current price p, ignoring future rounds.";

constexpr std::string_view kStrategicObjective =
    "Use reasoning to determine your belief q, then choose your action (Buy, Sell, or Hold: Yes "
    "and No shares). Maximize the sum of your expected payoffs over all trading rounds, based on "
    "your belief q and the current price p. Consider how your current trade affects the price and "
    "the beliefs of others in future\nrounds.";

constexpr std::string_view kReasoningNotice =
    "You will also be asked to provide your reasoning for your decision, which will be shared "
    "privately with you in future rounds where you trade. If public comments are allowed in the "
    "market, you can also post a public justification for your action that other participants can "
    "see.";

// {beta} is substituted.
constexpr std::string_view kExplanation =
    "=== What is a prediction market? ===\n"
    "A prediction market is a platform where participants can buy and sell shares in the outcome "
    "of a specific event, with a binary question that has two possible outcomes: Yes or No.\n"
    "The current price of a “Yes” share, denoted p, represents the market’s current "
    "belief that the event will resolve to “Yes.”\n"
    "For example, if p = 0.65, the market assigns a 65% chance that the event will resolve to "
    "“Yes.”\n"
    "\n"
    "Rules and reasoning process\n"
    "Interpret the question.\n"
    "Understand what “Yes” and “No” mean in this market.\n"
    "Form your own belief.\n"
    "Based on the question, historical prices, trader comments, and any reasoning you can infer, "
    "assign your own subjective probability q that the outcome will be “Yes.”\n"
    "\n"
    "This market operates on a Logarithmic Market Scoring Rule (LMSR) with a specific liquidity "
    "parameter (beta = {beta}). \n"
    "\n"
    "The current price of \"YES\" is determined by comparing the total shares sold for \"YES\" "
    "against the total shares sold for \"NO.\" Specifically, the price is the exponential of the "
    "\"YES\" shares divided by the sum of the exponentials of both \"YES\" and \"NO\" shares. "
    "Consequently, as the number of shares held in a specific outcome increases relative to the "
    "other, the price of that outcome rises.\n"
    "\n"
    "Initial Prices: The market does not always start at a 0.5/0.5 prices for Yes and No. It may "
    "be initialized with \"offset\" shares to reflect a specific starting likelihood (e.g., "
    "0.8/0.2) by the market maker, so it is as if the market maker has bought some Yes or No "
    "shares initially. \n"
    "\n"
    "Cost & Slippage: The cost to purchase shares is not linear (Price × Quantity). Instead, "
    "it is calculated by measuring the difference in the market's total cost function before and "
    "after the trade. As you buy more shares of an outcome, the price for each subsequent share "
    "incrementally increases. This phenomenon is known as \"price impact\" or \"slippage.\"\n"
    "\n"
    "You can only sell shares you own, and you can only buy shares if you have enough cash.\n"
    "Payoffs:\n"
    "If the final outcome is Yes, each “Yes” share pays 1, each “No” share pays 0.\n"
    "If the final outcome is No, each “No” share pays 1, each “Yes” share pays 0.\n"
    "Market dynamics:\n"
    "When the price of “Yes” rises, traders are collectively assigning higher probability "
    "to “Yes.”\n"
    "But beware: some traders may act strategically and try to manipulate prices.\n"
    "Use price history and comments to infer whether movements reflect genuine information or "
    "strategic behavior.\n";

constexpr std::string_view kTradingRules =
    "=== TRADING RULES ===\n"
    "  • You can BUY, SELL, or HOLD\n"
    "  • The price may change after each share (market impact)\n"
    "  • You can only buy if you have sufficient cash\n"
    "  • You can only sell shares you own\n";

std::string number_word(std::size_t n) {
  static constexpr std::string_view kWords[] = {"zero", "one", "two", "three", "four", "five",
                                                "six", "seven", "eight", "nine", "ten",
                                                "eleven", "twelve", "thirteen", "fourteen",
                                                "fifteen", "sixteen"};
  if (n < std::size(kWords)) return std::string(kWords[n]);
  return std::to_string(n);
}

std::string capitalized_trader(std::size_t t) { return fmt::format("Trader_{}", t + 1); }

// "x", "x or y", "x, y, or z"
std::string join_list(const std::vector<std::string>& items, std::string_view conj) {
  if (items.empty()) return {};
  if (items.size() == 1) return items[0];
  if (items.size() == 2) return fmt::format("{} {} {}", items[0], conj, items[1]);
  std::string out;
  for (std::size_t i = 0; i + 1 < items.size(); ++i) out += items[i] + ", ";
  return out + std::string(conj) + " " + items.back();
}

std::string signal_list(const InfoStructure& s, const std::vector<std::size_t>& sigs) {
  std::vector<std::string> names;
  for (auto i : sigs) names.push_back(s.space.signal_names[i]);
  return join_list(names, "and");
}

std::string dimension_question(const std::string& signal) {
  if (signal.size() == 3 && signal[0] == 'd' && signal[1] == '_' && std::isalpha(static_cast<unsigned char>(signal[2]))) {
    const char country = static_cast<char>(std::toupper(static_cast<unsigned char>(signal[2])));
    return fmt::format("Will sales in country {} exceed 1 million?", country);
  }
  return fmt::format("Will {} resolve to true?", signal);
}

bool prior_is_uniform(const InfoStructure& s) {
  const double u = 1.0 / static_cast<double>(s.state_count());
  for (double w : s.prior.weights)
    if (std::abs(w - u) > 1e-12) return false;
  return true;
}

std::string payoff_rule(const InfoStructure& s) {
  if (s.preset) {
    switch (*s.preset) {
      case StructureId::Easy:
        return "Yes if at least two dimensions (d_a,d_b,d_c) resolve to true. If more than one "
               "dimension resolves to false, then the answer to the question is No.";
      case StructureId::Medium:
      case StructureId::Hard:
        return "Yes if all three dimensions (d_a,d_b,d_c) resolve to true. If at least one "
               "dimension resolves to false, then the answer to the question is No.";
      case StructureId::VeryHard:
        return "Yes if exactly two of the three dimensions (d_a,d_b,d_c) resolve to true. If all "
               "three dimensions resolve to true, or at least two dimensions resolve to false, "
               "then the answer to the question is No.";
    }
  }
  std::vector<std::string> yes_states;
  for (StateIndex k = 0; k < s.state_count(); ++k) {
    if (s.security.payoff[k] < 0.5) continue;
    std::vector<std::string> parts;
    for (std::size_t j = 0; j < s.space.signal_names.size(); ++j)
      parts.push_back(s.space.signal_value(k, j) == 1 ? "true" : "false");
    yes_states.push_back("(" + fmt::format("{}", fmt::join(parts, ",")) + ")");
  }
  std::string tuple = "(" + fmt::format("{}", fmt::join(s.space.signal_names, ",")) + ")";
  if (yes_states.empty()) return "never Yes; the answer to the question is always No.";
  return fmt::format("Yes exactly when {} is one of: {}. Otherwise the answer to the question is No.",
                     tuple, fmt::join(yes_states, ", "));
}

std::string informed_clause(const InfoStructure& s) {
  std::vector<std::string> parts;
  for (std::size_t t = 0; t < s.trader_count(); ++t) {
    if (!s.observed_signals.empty()) {
      const auto& sigs = s.observed_signals[t];
      parts.push_back(fmt::format("{} is privately informed whether {} {} true or not",
                                  capitalized_trader(t), signal_list(s, sigs),
                                  sigs.size() == 1 ? "is" : "are"));
    } else {
      std::vector<std::string> cells;
      for (const auto& c : s.partitions[t].cells()) cells.push_back(describe_event(s, c));
      parts.push_back(fmt::format("{} privately learns which of the groups of states {} contains "
                                  "the true state",
                                  capitalized_trader(t), fmt::join(cells, ", ")));
    }
  }
  return join_list(parts, "and") + ".";
}

std::string traders_phrase(std::size_t n) {
  if (n == 1) return "There is one trader in the market.";
  return fmt::format("There are {} traders in the market.", number_word(n));
}

std::string all_traders_phrase(std::size_t n) {
  if (n == 1) return "The trader assigns";
  if (n == 2) return "Both traders assign";
  return fmt::format("All {} traders assign", number_word(n));
}

std::string sided_price(const Trade& t, double yes_price) {
  return format_price(t.side == Side::Yes ? yes_price : 1.0 - yes_price, 2);
}

std::string trade_history_line(const Trade& t) {
  const std::string verb = t.action == Action::Buy ? "bought" : "sold";
  const auto before = sided_price(t, t.price_before);
  const auto after = sided_price(t, t.price_after);
  const std::string movement = before == after
                                   ? fmt::format("at {}", after)
                                   : fmt::format("price went from {} to {}", before, after);
  return fmt::format("{} {} {} {} shares, {} on {}", trader_name(t.trader), verb, t.executed,
                     side_name(t.side), movement, t.timestamp);
}

std::string impact_row(const ImpactRow& r) {
  std::string label = r.buy ? "Buy" : "Sell";
  if (!r.qualifier.empty()) label += fmt::format(" ({})", r.qualifier);
  const char sign = r.buy ? '+' : '-';
  return fmt::format("  {} {}: {} → {} ({}{:.1f}%)", label, r.shares,
                     format_price(r.price_before, 3), format_price(r.price_after, 3), sign,
                     std::abs(r.percent_change));
}

void append_side_impact(std::string& out, const SideImpact& side) {
  out += fmt::format("{} shares:\n", side_name(side.side));
  if (side.rows.empty()) out += "  (no trades possible)\n";
  for (const auto& r : side.rows) out += impact_row(r) + "\n";
}

} // namespace

std::string_view market_question() { return kQuestion; }

std::string public_information_text(const InfoStructure& s) {
  std::string out = "The prediction market question has two answers: Yes and No. ";
  const std::size_t n = s.space.signal_names.size();
  out += fmt::format("There are {} relevant dimensions to this prediction market question:",
                     number_word(n));
  for (const auto& sig : s.space.signal_names)
    out += fmt::format(" dimension {}: {}", sig, dimension_question(sig));
  if (prior_is_uniform(s)) {
    out += " The answer to each dimension is either true, with probability 0.5, or false, with "
           "probability 0.5. Dimensions are independent, hence the probability of a dimension d "
           "resolving to true is independent of whether the other dimensions resolve to true or "
           "false.";
  } else {
    std::vector<std::string> probs;
    for (StateIndex k = 0; k < s.state_count(); ++k)
      probs.push_back(fmt::format("{}: {:g}", s.space.state_names[k], s.prior.weights[k]));
    out += fmt::format(" The states of the world have the following probabilities: {}.",
                       fmt::join(probs, ", "));
  }
  out += fmt::format(" In summary, there are {} states of the world, depending on whether {} are "
                     "true or false.",
                     number_word(s.state_count()), join_list(s.space.signal_names, "or"));
  out += " The answer to the prediction market question of whether the profits of Company X will "
         "exceed 1 million is ";
  out += payoff_rule(s);
  out += " " + traders_phrase(s.trader_count()) + " " + informed_clause(s);
  out += " " + all_traders_phrase(s.trader_count()) +
         " the same prior probabilities to each dimension resolving to true or false.";
  return out;
}

std::string private_information_text(const InfoStructure& s, std::size_t trader) {
  std::string out = fmt::format(
      "A true state has now occurred. You ({}) are now informed truthfully and privately that ",
      trader_name(trader));
  if (s.observed_signals.empty()) {
    return out + fmt::format("the true state is one of {}.",
                             describe_event(s, s.partitions.at(trader).cell_of(s.true_state)));
  }
  const auto& sigs = s.observed_signals.at(trader);
  bool uniform = true;
  for (auto sig : sigs)
    uniform = uniform && s.space.signal_value(s.true_state, sig) ==
                             s.space.signal_value(s.true_state, sigs.front());
  if (uniform) {
    const bool value = s.space.signal_value(s.true_state, sigs.front()) == 1;
    return out + fmt::format("{} {} {}.", signal_list(s, sigs), sigs.size() == 1 ? "is" : "are",
                             value ? "true" : "false");
  }
  std::vector<std::string> parts;
  for (auto sig : sigs)
    parts.push_back(fmt::format("{} is {}", s.space.signal_names[sig],
                                s.space.signal_value(s.true_state, sig) == 1 ? "true" : "false"));
  return out + join_list(parts, "and") + ".";
}

std::string_view objective_text(Objective objective) {
  return objective == Objective::Myopic ? kMyopicObjective : kStrategicObjective;
}

std::string disclosure_block(const DisclosureInfo& info) {
  auto score = [&](std::size_t t) -> std::string {
    if (t >= info.intelligence.size() || !info.intelligence[t]) return "unknown";
    return fmt::format("{:g}", *info.intelligence[t]);
  };
  double sum = 0.0;
  int known = 0;
  for (const auto& v : info.intelligence)
    if (v) { sum += *v; ++known; }
  const std::string average = known > 0 ? fmt::format("{:.2f}", sum / known) : "unknown";

  std::string out =
      "=== Experimental Findings & Strategic Context ===\n"
      "Before trading, all traders are informed about the following qualitative \n"
      "results from a study of over 1,700 similar prediction markets involving LLM \n"
      "agents. Use them to guide your decisions.\n"
      "Definition of market accuracy: denotes how close is the last price of the \n"
      "Yes shares to the true value of the Yes shares, and similarly for the No\n"
      "shares.\n"
      "Definition of Intelligence: Agents are scored on the \"Artificial Analysis \n"
      "Intelligence Index\" (reasoning, math, coding). The observed range in our \n"
      "study is 7 (Low) to 46 (High).\n"
      "\n"
      "1. Intelligence\n";
  out += fmt::format("* Your Intelligence ({}): {}\n", trader_name(info.trader), score(info.trader));
  for (std::size_t t = 0; t < info.intelligence.size(); ++t) {
    if (t == info.trader) continue;
    out += fmt::format("* Intelligence of {}: {}\n", trader_name(t), score(t));
  }
  out += fmt::format("* Average Group Intelligence: {}\n", average);
  out +=
      "Result 1 shows that higher individual intelligence directly correlates \n"
      "with higher profits.\n"
      "\n"
      "2. Market Complexity\n"
      "* We ranked the market structures by complexity of reasoning: Level 1 \n"
      "(Easiest) < Level 2 < Level 3 < Level 4 (Hardest).\n";
  out += fmt::format("* Current Status: You are trading in a Level {} market.\n",
                     info.complexity_level ? std::to_string(*info.complexity_level) : "unknown");
  out +=
      "Result 2 shows that as complexity rises, trader profits decrease and \n"
      "the market becomes less accurate.\n"
      "\n"
      "3. Market Design\n"
      "* Result 3: Trading order significantly impacts profitability. The most \n"
      "profitable position is 3rd, followed by 1st, with 2nd being the least \n"
      "profitable (3rd > 1st > 2nd).\n"
      "* Result 4: Higher average group intelligence leads to a more accurate \n"
      "market but lower individual profits.\n"
      "* Neutral Factors: The following factors have no statistically significant \n"
      "effect on market accuracy:\n"
      "* Result 5: Posting public comments has no effect on market accuracy.\n"
      "* Result 6: Being \"myopic\" (maximize profits on current round only) vs. \n"
      "\"strategic\" (maximize profits for current and all future rounds) has no \n"
      "effect on market accuracy.\n"
      "* Result 7: The initial price of the market has no effect on market \n"
      "accuracy.\n"
      "* Result 8: Increasing the duration of the market (9 rounds vs 3) has no \n"
      "effect on market accuracy.\n";
  return out;
}

std::string format_money(double amount) {
  if (amount < 0 && std::round(amount * 100.0) != 0.0) return fmt::format("-£{:.2f}", -amount);
  return fmt::format("£{:.2f}", std::abs(amount));
}

std::string format_price(double price, int digits) {
  return fmt::format("£{:.{}f}", price, digits);
}

std::string build_prompt(const AgentContext& ctx) {
  std::vector<std::string> names;
  for (std::size_t t = 0; t < ctx.trader_count; ++t) names.push_back(trader_name(t));
  std::vector<std::string> others;
  for (std::size_t t = 0; t < ctx.trader_count; ++t)
    if (t != ctx.trader) others.push_back(trader_name(t));
  const std::string participants = fmt::format("{}", fmt::join(names, ", "));

  std::string out;
  // Part one: market details.
  out += fmt::format("You are {}, a participant in the following prediction market.\n\n",
                     trader_name(ctx.trader));
  out += "=== PREDICTION MARKET ===\n";
  out += fmt::format("Question: {}\n", ctx.question);
  out += fmt::format("Description: {}\n", ctx.description);
  out += fmt::format("Comments allowed: {}\n", ctx.comments_allowed ? "Yes" : "No");
  out += fmt::format("Current Round: {}\n", ctx.round);
  out += fmt::format("Total Rounds in the Market: {}\n", ctx.total_rounds);
  out += fmt::format("Participants: {}\n\n", participants);
  out += "Participants trade sequentially and in the order specified above. After the last "
         "participant trades, \n"
         "the first participant trades again, and so on, until we reach the last round and the "
         "market ends. \n";
  out += fmt::format("The other participants in this prediction market are: {}.\n\n\n",
                     fmt::join(others, ", "));

  // Part two: public and private information.
  out += fmt::format("Public Information: {}\n\n\n", ctx.public_info);
  out += fmt::format("Your Private Information (only shared with you): {}\n\n\n", ctx.private_info);
  if (!ctx.own_reasonings.empty()) {
    out += "Your previous private reasoning (only visible to you):\n";
    for (const auto& r : ctx.own_reasonings) out += fmt::format("  [Round {}] {}\n", r.round, r.text);
    out += "\n\n";
  }

  // Part three: what a prediction market is.
  out += fmt::format(fmt::runtime(kExplanation), fmt::arg("beta", ctx.market.beta));
  out += "\n";

  // Part four: objective.
  out += "=== YOUR OBJECTIVE ===\n";
  out += std::string(objective_text(ctx.objective)) + "\n";
  out += std::string(kReasoningNotice) + "\n\n";

  // Part five: market data, portfolio and price impact.
  const double p_yes = ctx.market.price_of_yes();
  const double p_no = ctx.market.price_of_no();
  out += "=== PUBLIC INFORMATION ===\n";
  out += fmt::format("This section contains all publicly available market data, generated by the "
                     "participants: {}.\n\n",
                     participants);
  out += "Current Prices\n";
  out += fmt::format("  Yes: {} per share\n", format_price(p_yes, 2));
  out += fmt::format("  No: {} per share\n\n", format_price(p_no, 2));
  out += "Trade History (oldest first):\n";
  bool any_trade = false;
  for (const auto& t : ctx.trades) {
    if (t.executed <= 0 || t.action == Action::Hold) continue;
    out += trade_history_line(t) + "\n";
    any_trade = true;
  }
  if (!any_trade) out += "No trades yet.\n";
  out += "\n";
  if (ctx.comments_allowed) {
    out += fmt::format("Market Comments ({} total, most recent first):\n", ctx.comments.size());
    for (auto it = ctx.comments.rbegin(); it != ctx.comments.rend(); ++it)
      out += fmt::format("  [{}] {}: {}\n", it->timestamp, trader_name(it->trader), it->text);
    out += "\n";
  }
  out += "\n";

  const auto& pf = ctx.portfolio;
  const auto yes_n = static_cast<double>(pf.yes_shares);
  const auto no_n = static_cast<double>(pf.no_shares);
  out += "=== YOUR CURRENT PORTFOLIO ===\n";
  out += fmt::format("Portfolio for {}:\n", trader_name(ctx.trader));
  out += fmt::format("  Cash: {}\n", format_money(pf.cash));
  out += fmt::format("  Yes: {} shares (value at current prices: {}, payoff: {} if Yes wins, {} if "
                     "No wins)\n",
                     pf.yes_shares, format_money(yes_n * p_yes), format_money(yes_n),
                     format_money(0.0));
  out += fmt::format("  No: {} shares (value at current prices: {}, payoff: {} if Yes wins, {} if "
                     "No wins)\n",
                     pf.no_shares, format_money(no_n * p_no), format_money(0.0),
                     format_money(no_n));
  out += fmt::format("  Total Portfolio Value: {}\n\n",
                     format_money(pf.cash + yes_n * p_yes + no_n * p_no));
  out += "Given the current prices and your cash balance, you can afford to buy up to:\n\n";
  out += fmt::format("YES shares: {} (total cost: {})\n", ctx.impact.yes.max_buy,
                     format_money(ctx.impact.yes.max_buy_cost));
  out += fmt::format("NO shares: {} (total cost: {})\n\n", ctx.impact.no.max_buy,
                     format_money(ctx.impact.no.max_buy_cost));
  out += "Notes: These calculations account for price increases as you buy more shares.\n\n";
  out += "Maximum sellable shares (based on shares you currently own):\n\n";
  out += fmt::format("Yes: {} shares\n", ctx.impact.yes.max_sell);
  out += fmt::format("No: {} shares\n\n", ctx.impact.no.max_sell);

  out += "=== PRICE IMPACT OF TRADES ===\n";
  out += "This shows how prices would change if you buy or sell shares:\n\n";
  append_side_impact(out, ctx.impact.yes);
  out += "\n";
  append_side_impact(out, ctx.impact.no);
  out += "\nNotes: These are simulations only. Actual prices may vary slightly due to concurrent "
         "trades.\n\n";
  out += kTradingRules;
  out += "\n";

  // Part six: disclosure treatment.
  if (ctx.disclosure) out += *ctx.disclosure + "\n";

  // Part seven: decision request.
  out += "=== YOUR DECISION ===\n";
  out += "Analyze the market and your portfolio, then respond with a JSON object:\n";
  out += "{\n";
  out += "  \"action\": \"BUY or SELL or HOLD\",\n";
  out += fmt::format("  \"instrument_id\": \"the ID number of the instrument ({} for Yes, {} for "
                     "No)\",\n",
                     ctx.instruments.yes, ctx.instruments.no);
  out += "  \"size\": \"number of shares\",\n";
  if (ctx.comments_allowed) {
    out += "  \"public_justification\": \"brief explanation of your reasoning that you want "
           "everyone to know (this will be posted as a market comment visible to everyone)\",\n";
  }
  out += "  \"private_reasoning\": \"brief explanation of your reasoning that only you will see "
         "(this will NOT be posted as a comment; it will only be visible to you in your next "
         "turn)\"\n";
  out += "}\n\n";
  out += "Important: Only output valid JSON. No other text.\n";
  return out;
}

} // namespace infoagg
