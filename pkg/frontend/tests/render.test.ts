import { describe, expect, it } from "vitest";

import type { AskResponse, AskResult } from "../src/api";
import { codePointSlice, renderCard, renderResults } from "../src/render";

function result(partial: Partial<AskResult> & Pick<AskResult, "position">): AskResult {
  return {
    url: `https://exemplu.ro/p${partial.position}`,
    title: `Rezultat ${partial.position}`,
    snippet: "un snippet oarecare de test",
    answer: null,
    c: 0.9,
    r: partial.position,
    q: 0.9 - partial.position * 0.1,
    ...partial,
  };
}

const threeResults: AskResponse = {
  query_terms: ["covid", "vara"],
  results: [
    result({
      position: 0,
      snippet: "Virusul circulă mai puțin vara, arată datele.",
      answer: { text: "circulă mai puțin vara,", start: 8, end: 31 },
      q: 0.91,
    }),
    result({
      position: 1,
      snippet: "Un alt snippet cu răspuns marcat aici.",
      answer: { text: "răspuns marcat", start: 18, end: 32 },
      q: 0.78,
    }),
    result({
      position: 2,
      snippet: "Al treilea snippet complet.",
      answer: { text: "treilea", start: 3, end: 10 },
      q: 0.55,
    }),
  ],
};

describe("codePointSlice", () => {
  it("slices by scalar values, not UTF-16 units", () => {
    // "x😀 abc": scalar indices x=0, 😀=1, space=2, a=3, b=4, c=5
    expect(codePointSlice("x😀 abc", 3, 6)).toBe("abc");
    // the same slice on UTF-16 units would be shifted by the surrogate pair
    expect("x😀 abc".slice(3, 6)).not.toBe("abc");
  });

  it("matches plain slicing for BMP text", () => {
    expect(codePointSlice("ab cde fg", 3, 7)).toBe("cde ");
  });
});

describe("renderResults", () => {
  it("renders three cards in response order with exactly one highlight each", () => {
    const region = renderResults({
      kind: "results",
      question: "Dispare covidul vara?",
      response: threeResults,
    });
    const cards = region.querySelectorAll(".result-card");
    expect(cards).toHaveLength(3);
    const qs = [...cards].map((card) =>
      Number(card.querySelector(".score")!.textContent!.replace("q = ", "")),
    );
    expect(qs).toEqual([0.91, 0.78, 0.55]);
    for (const [index, card] of [...cards].entries()) {
      const marks = card.querySelectorAll("mark");
      expect(marks).toHaveLength(1);
      expect(marks[0].textContent).toBe(
        threeResults.results[index].answer!.text,
      );
    }
  });

  it("highlights exactly the server-given scalar range", () => {
    const card = renderCard(
      result({
        position: 0,
        snippet: "ab cde fg",
        answer: { text: "cde ", start: 3, end: 7 },
      }),
    );
    expect(card.querySelector("mark")!.textContent).toBe("cde ");
    expect(card.querySelector(".snippet")!.textContent).toBe("ab cde fg");
  });

  it("highlights correctly with astral characters before the answer", () => {
    const snippet = "x😀 abc def";
    // scalar offsets: answer "abc" at [3, 6)
    const card = renderCard(
      result({
        position: 0,
        snippet,
        answer: { text: "abc", start: 3, end: 6 },
      }),
    );
    expect(card.querySelector("mark")!.textContent).toBe("abc");
    expect(card.querySelector(".snippet")!.textContent).toBe(snippet);
  });

  it("renders a no-answer card without any highlight", () => {
    const card = renderCard(result({ position: 0, answer: null }));
    expect(card.querySelectorAll("mark")).toHaveLength(0);
    expect(card.querySelector(".snippet")!.textContent).toBe(
      "un snippet oarecare de test",
    );
  });

  it("keeps markup-looking snippet text inert", () => {
    const card = renderCard(
      result({
        position: 0,
        snippet: "text cu <b>taguri</b> false",
        answer: { text: "<b>taguri</b>", start: 8, end: 21 },
      }),
    );
    expect(card.querySelectorAll("b")).toHaveLength(0);
    expect(card.querySelector("mark")!.textContent).toBe("<b>taguri</b>");
  });

  it("links each card title to its source site", () => {
    const region = renderResults({
      kind: "results",
      question: "q?",
      response: threeResults,
    });
    const links = [...region.querySelectorAll(".result-card a")].map(
      (a) => (a as HTMLAnchorElement).href,
    );
    expect(links).toEqual([
      "https://exemplu.ro/p0",
      "https://exemplu.ro/p1",
      "https://exemplu.ro/p2",
    ]);
  });

  it("distinguishes empty, error and validation states", () => {
    const empty = renderResults({ kind: "empty", question: "q?" });
    expect(empty.dataset.state).toBe("empty");
    expect(empty.querySelector(".empty")).not.toBeNull();
    expect(empty.querySelector(".retry")).toBeNull();

    const error = renderResults({ kind: "error", question: "q?", message: "boom" });
    expect(error.dataset.state).toBe("error");
    expect(error.querySelector(".error")!.textContent).toContain("boom");
    expect(error.querySelector("button.retry")).not.toBeNull();

    const invalid = renderResults({ kind: "invalid", message: "Please enter a question." });
    expect(invalid.querySelector(".validation-error")).not.toBeNull();
  });

  it("idle state renders nothing", () => {
    const region = renderResults({ kind: "idle" });
    expect(region.children).toHaveLength(0);
  });

  it("matches the results snapshot", () => {
    const region = renderResults({
      kind: "results",
      question: "Dispare covidul vara?",
      response: threeResults,
    });
    expect(region.innerHTML).toMatchSnapshot();
  });
});
