// Browser entry point: mount the app against the service URL.

import { HttpApi } from "./api.js";
import { createApp } from "./app.js";

const apiBase =
  (window as { __TABLEQA_API__?: string }).__TABLEQA_API__ ?? "http://127.0.0.1:8080";

const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
createApp(root, new HttpApi(apiBase));
