/** Hash router: #/ rounds list · #/round/N control · #/round/N/review queue. */

import { ApiClient } from "./api.js";
import { ReviewQueueStore } from "./state.js";
import { RoundControlView, ReviewQueueView } from "./views.js";

const client = new ApiClient("", localStorage.getItem("annotator") ?? "scholar");

let activeQueueView: ReviewQueueView | null = null;

async function route(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  if (activeQueueView) {
    activeQueueView.unmount();
    activeQueueView = null;
  }
  const hash = location.hash || "#/";
  const review = hash.match(/^#\/round\/(\d+)\/review$/);
  const control = hash.match(/^#\/round\/(\d+)$/);
  if (review) {
    const store = new ReviewQueueStore(client, Number(review[1]));
    activeQueueView = new ReviewQueueView(client, store, root);
    await activeQueueView.mount();
  } else if (control) {
    await new RoundControlView(client, root).mount(Number(control[1]));
  } else {
    const { renderRoundsList } = await import("./views.js");
    await renderRoundsList(client, root);
  }
}

window.addEventListener("hashchange", () => void route());
window.addEventListener("DOMContentLoaded", () => void route());
