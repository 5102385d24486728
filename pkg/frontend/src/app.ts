/**
 * Single-page wiring.  The engine address comes from the `?server=` query
 * parameter; everything on screen is driven by one connection to it.
 */

import { Announcer } from "./announce.js";
import { CalcView } from "./calcview.js";
import { Connection, connectWebSocket } from "./connection.js";
import { button, el } from "./dom.js";
import { RefineView } from "./refineview.js";
import { SpecForm } from "./specform.js";
import { TermView } from "./termview.js";

export const DEFAULT_SERVER = "ws://127.0.0.1:8900";

export function serverUrl(search: string, fallback = DEFAULT_SERVER): string {
  const params = new URLSearchParams(search);
  return params.get("server") ?? fallback;
}

export interface App {
  announcer: Announcer;
  specForm: SpecForm | null;
  termView: TermView | null;
  refineView: RefineView | null;
  calcView: CalcView | null;
  open(id: string): Promise<void>;
}

export async function boot(root: HTMLElement, conn: Connection): Promise<App> {
  const announcer = new Announcer(root);
  const nav = el("nav", "examples");
  nav.setAttribute("aria-label", "examples");
  const workspace = el("main", "workspace");
  root.append(nav, workspace);

  const app: App = {
    announcer,
    specForm: null,
    termView: null,
    refineView: null,
    calcView: null,
    async open(id: string) {
      const r = await conn.call("example/open", { id });
      const session = r.session;
      workspace.replaceChildren();

      const termView = new TermView(conn, announcer, { session });
      const specForm = new SpecForm(conn, announcer, session, {
        onInspect: (payload) => termView.setTerm(payload),
      });
      const refineView = new RefineView(conn, announcer, {
        session,
        onSelect: (problem) => {
          void conn
            .call("refs/set", { session, slot: "RProblem", id: problem })
            .then((response) => specForm.render(response.template));
        },
      });
      const calcView = new CalcView(conn, announcer, session, {
        onFormula: (payload) => termView.setTerm(payload),
      });

      specForm.render(r.template);
      refineView.setProblem(r.template.references.RProblem ?? "");
      workspace.append(specForm.root, termView.root, refineView.root, calcView.root);
      app.specForm = specForm;
      app.termView = termView;
      app.refineView = refineView;
      app.calcView = calcView;
      announcer.announce(`opened ${r.template.title}`);
    },
  };

  const list = await conn.call("example/list");
  for (const example of list.examples) {
    const pick = button(example.title, () => {
      void app.open(example.id);
    });
    pick.dataset.example = example.id;
    nav.appendChild(pick);
  }
  return app;
}

// self-boot inside a real page; tests build their own wiring
const mount = typeof document !== "undefined" ? document.getElementById("app") : null;
if (mount !== null) {
  connectWebSocket(serverUrl(window.location.search))
    .then((transport) => boot(mount, new Connection(transport)))
    .catch((e: unknown) => {
      mount.textContent = e instanceof Error ? e.message : String(e);
    });
}
