/** View state shared by the three modes.
 *
 * Invariants: switching modes never drops the current concept selection (it
 * is the handle the views pass each other), and centering is only
 * meaningful while a concept is selected.
 */

export type Mode = "browse" | "inspect" | "compare";

export interface CompareSet {
  reference: string | null;
  comparisons: string[];
}

export interface ViewState {
  mode: Mode;
  activeCorpus: string | null;
  selectedConcept: string | null;
  centered: boolean;
  compare: CompareSet;
}

export function initialState(): ViewState {
  return {
    mode: "browse",
    activeCorpus: null,
    selectedConcept: null,
    centered: false,
    compare: { reference: null, comparisons: [] },
  };
}

export function setMode(state: ViewState, mode: Mode): ViewState {
  const next = { ...state, mode };
  if (mode === "compare" && !next.compare.reference && next.selectedConcept) {
    next.compare = { ...next.compare, reference: next.selectedConcept };
  }
  return next;
}

export function selectConcept(state: ViewState, conceptId: string | null): ViewState {
  return {
    ...state,
    selectedConcept: conceptId,
    centered: conceptId === null ? false : state.centered,
  };
}

export function setCentered(state: ViewState, centered: boolean): ViewState {
  if (centered && !state.selectedConcept) {
    return state; // centering requires a selection
  }
  return { ...state, centered };
}

export function setActiveCorpus(state: ViewState, corpusId: string): ViewState {
  return { ...state, activeCorpus: corpusId };
}

export function setCompareSet(state: ViewState, compare: CompareSet): ViewState {
  return { ...state, compare };
}
