import { Api } from "./api.js";
import { App } from "./app.js";

const mount = document.getElementById("app");
if (mount === null) throw new Error("missing #app mount point");

const app = new App(mount, new Api());
void app.init().catch((err) => {
  mount.textContent = `failed to start: ${err}`;
});
