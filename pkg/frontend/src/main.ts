import { createAppContext, renderApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  renderApp(createAppContext(root));
}
