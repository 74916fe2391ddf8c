import { ApiClient } from "./api.js";
import { SessionController } from "./controller.js";
import { keyboardHandler, render } from "./view.js";

const serviceUrl =
  new URLSearchParams(window.location.search).get("service") ?? "http://127.0.0.1:8321";

const container = document.getElementById("app");
if (!container) throw new Error("missing #app container");

const api = new ApiClient(serviceUrl);
const controller = new SessionController(api, (state) => {
  render(container, state, controller);
});

document.addEventListener("keydown", keyboardHandler(controller));
void controller.start();
