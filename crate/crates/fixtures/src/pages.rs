//! HTML for every fixture page. Layout targets a 1366×768 viewport: the top
//! 240 px is a header band, navigation and content sit below it.

use std::fmt::Write as _;

use crate::{Scenario, ScenarioParams};

pub(crate) struct PageContext<'a> {
    pub params: &'a ScenarioParams,
    /// Original query string including `?`, carried into same-site links.
    pub query: &'a str,
    pub secondary_origin: &'a str,
}

const PAGES: u32 = 5;

const STYLE: &str = "\
html,body{margin:0;padding:0;background:#fff;color:#222;font:16px/1.5 sans-serif}\
header{height:240px;box-sizing:border-box;padding:32px 24px;background:#e9eef4;position:relative}\
header h1{margin:0 0 12px;font-size:32px}\
nav{padding:16px 24px;border-bottom:1px solid #ccd}\
nav a{margin-right:20px;color:#1a4d8f}\
main{padding:8px 24px}\
main img{margin:8px 12px 8px 0;vertical-align:top}\
button{font:inherit}";

const WORDS: [&str; 24] = [
    "cookie", "layout", "render", "banner", "content", "session", "article", "gallery", "review",
    "market", "weather", "travel", "science", "history", "garden", "music", "recipe", "sports",
    "design", "library", "harbor", "signal", "meadow", "orbit",
];

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn document(title: &str, params: Option<&ScenarioParams>, head_extra: &str, body: &str) -> String {
    let params_json = params
        .map(|p| serde_json::to_string(p).expect("params serialize"))
        .unwrap_or_else(|| "{}".into());
    format!(
        "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>{title}</title>\
<script type=\"application/json\" id=\"scenario-params\">{params_json}</script>\
<style>{STYLE}</style>{head_extra}</head>\n<body>{body}</body></html>\n",
        title = escape(title),
    )
}

/// Deterministic filler paragraph for page `n`.
fn paragraph(seed: u32, sentences: u32) -> String {
    let mut out = String::new();
    for s in 0..sentences {
        for w in 0..9 {
            let i = (seed.wrapping_mul(7) + s * 5 + w * 3) as usize % WORDS.len();
            out.push_str(WORDS[i]);
            out.push(if w == 8 { '.' } else { ' ' });
        }
        out.push(' ');
    }
    out
}

/// Shared body of the static, rotating and cookie-gated scenarios.
fn site_body(ctx: &PageContext<'_>, scenario: Scenario, page: u32, header_extra: &str) -> String {
    let slug = scenario.slug();
    let page = page % PAGES;
    let q = escape(ctx.query);
    let mut nav = String::new();
    for n in 0..PAGES {
        let _ = write!(nav, "<a href=\"/{slug}/p/{n}{q}\">Section {n}</a>");
    }
    format!(
        "<header><h1>{title} page {page}</h1><p>{lead}</p>{header_extra}</header>\
<nav>{nav}</nav>\
<main><p>{p1}</p>\
<img src=\"/assets/img/tile-{a}.png\" width=\"160\" height=\"100\" alt=\"tile {a}\">\
<img src=\"/assets/img/tile-{b}.png\" width=\"160\" height=\"100\" alt=\"tile {b}\">\
<p>{p2}</p><button type=\"button\" id=\"details\">Details</button></main>",
        title = slug,
        lead = paragraph(page + 11, 1),
        p1 = paragraph(page, 3),
        p2 = paragraph(page + 3, 2),
        a = page,
        b = (page + 1) % PAGES,
    )
}

pub(crate) fn static_page(ctx: &PageContext<'_>, page: u32) -> String {
    document(
        &format!("Static {page}"),
        Some(ctx.params),
        "",
        &site_body(ctx, Scenario::Static, page, ""),
    )
}

/// The static layout plus a promo box in the header whose color, text and link
/// id change on every request.
pub(crate) fn rotating_page(ctx: &PageContext<'_>, page: u32, turn: u64) -> String {
    let hue = (turn * 137) % 360;
    let promo = format!(
        "<div id=\"promo\" style=\"position:absolute;top:24px;right:24px;width:360px;height:160px;\
background:hsl({hue},70%,45%);color:#fff;padding:16px;box-sizing:border-box\">\
<strong>Promo #{turn}</strong><br><a id=\"promo-{turn}\" style=\"color:#fff\" href=\"/rotating/p/{target}{q}\">Offer {turn}</a></div>",
        target = turn % u64::from(PAGES),
        q = escape(ctx.query),
    );
    document(
        &format!("Rotating {page}"),
        Some(ctx.params),
        "",
        &site_body(ctx, Scenario::RotatingBanner, page, &promo),
    )
}

/// The static layout plus a hidden third-party frame. When the frame reports
/// that it could not store its cookie, a fixed banner covering the top
/// `banner_height` pixels is shown.
pub(crate) fn gated_page(ctx: &PageContext<'_>, page: u32) -> String {
    let origin = ctx.secondary_origin;
    let head = format!(
        "<style>#tp-banner{{position:fixed;left:0;top:0;width:100%;height:{h}px;display:none;\
background:#b71c1c;color:#fff;font-size:28px;padding:32px;box-sizing:border-box;z-index:10}}</style>\
<script>window.__tpCookie=null;addEventListener('message',function(e){{\
if(e.origin!=={origin:?}||!e.data||typeof e.data.thirdPartyCookie!=='boolean')return;\
window.__tpCookie=e.data.thirdPartyCookie;\
document.getElementById('tp-banner').style.display=e.data.thirdPartyCookie?'none':'block';}});</script>",
        h = ctx.params.banner_height(),
    );
    let body = format!(
        "<div id=\"tp-banner\">Please enable third-party cookies to continue.</div>{site}\
<iframe src=\"{origin}/tp/frame\" title=\"probe\" \
style=\"position:absolute;left:-20px;top:-20px;width:1px;height:1px;border:0\"></iframe>",
        site = site_body(ctx, Scenario::CookieGated, page, ""),
    );
    document(&format!("Gated {page}"), Some(ctx.params), &head, &body)
}

pub(crate) fn cross_domain(ctx: &PageContext<'_>) -> String {
    let body = format!(
        "<header><h1>Leaving soon</h1><p>{}</p></header>\
<main><p>The only way forward is <a id=\"away\" href=\"{}/elsewhere\">another site</a>.</p></main>",
        paragraph(40, 2),
        ctx.secondary_origin,
    );
    document("Cross domain", Some(ctx.params), "", &body)
}

pub(crate) fn chain(ctx: &PageContext<'_>, page: u32) -> String {
    let depth = ctx.params.chain_depth;
    let next = if page < depth {
        format!(
            "<p><a id=\"next\" href=\"/chain/{}{}\">Continue to page {}</a></p>",
            page + 1,
            escape(ctx.query),
            page + 1
        )
    } else {
        "<p>End of the chain.</p>".to_string()
    };
    let body = format!(
        "<header><h1>Chain page {page} of {depth}</h1><p>{}</p></header><main>{next}</main>",
        paragraph(page + 50, 2)
    );
    document(&format!("Chain {page}"), Some(ctx.params), "", &body)
}

pub(crate) fn slow(ctx: &PageContext<'_>) -> String {
    document(
        "Slow",
        Some(ctx.params),
        "",
        "<main><p>Finally here. <a href=\"/static/\">Home</a></p></main>",
    )
}

pub(crate) fn third_party_frame() -> String {
    document(
        "Probe",
        None,
        "",
        "<script>\
document.cookie='tp_probe=1; SameSite=None; Secure; Path=/; Max-Age=3600';\
var ok=document.cookie.indexOf('tp_probe=1')!==-1;\
parent.postMessage({thirdPartyCookie:ok},'*');\
</script>",
    )
}

pub(crate) fn elsewhere() -> String {
    document(
        "Elsewhere",
        None,
        "",
        "<main><h1>A different site</h1><p><a href=\"/elsewhere\">Stay here</a></p></main>",
    )
}

pub(crate) fn cookie_set(name: &str, value: &str) -> String {
    document(
        "Cookie set",
        None,
        "",
        &format!(
            "<main><p id=\"set\">{}={}</p><a href=\"/cookies/echo\">Echo</a></main>",
            escape(name),
            escape(value)
        ),
    )
}

pub(crate) fn cookie_echo(sent: &str) -> String {
    document(
        "Cookie echo",
        None,
        "",
        &format!(
            "<main><pre id=\"sent\">{}</pre><pre id=\"visible\"></pre></main>\
<script>document.getElementById('visible').textContent=document.cookie;</script>",
            escape(sent)
        ),
    )
}

/// Two buttons, three anchors and one `onclick` div.
pub(crate) fn clickables() -> String {
    document(
        "Clickables",
        None,
        "",
        "<main>\
<button id=\"b1\" type=\"button\">One</button>\
<button type=\"button\">Two</button>\
<ul id=\"m\"><li><a href=\"/static/p/0\">First</a></li><li><a href=\"/static/p/1\">Second</a></li>\
<li><a href=\"/static/p/2\">Third</a></li></ul>\
<div onclick=\"this.textContent='clicked'\">Press</div>\
</main>",
    )
}

/// Images with a repeated source, one without `src`, plus a script and a
/// cross-origin image for resource timing.
pub(crate) fn images(secondary_origin: &str) -> String {
    let body = format!(
        "<main>\
<img src=\"/assets/img/tile-0.png\" alt=\"a\"><img src=\"/assets/img/tile-0.png\" alt=\"b\">\
<img src=\"/assets/img/tile-1.png\" alt=\"c\"><img alt=\"no source\">\
<img src=\"{secondary_origin}/assets/img/remote.png\" alt=\"remote\">\
<p><a href=\"/static/\">home</a><a>no target</a></p>\
<script src=\"/assets/app.js\"></script>\
</main>"
    );
    document("Images", None, "", &body)
}

pub(crate) fn tall() -> String {
    document(
        "Tall",
        None,
        "<style>html{scroll-behavior:smooth}</style>",
        "<main><p id=\"top\">Top of page</p><div style=\"height:4000px\"></div><p id=\"bottom\">Bottom</p></main>",
    )
}

pub(crate) fn blank() -> String {
    document("Blank", None, "", "")
}

pub(crate) fn index() -> String {
    let mut links = String::new();
    for s in Scenario::ALL {
        let _ = write!(links, "<li><a href=\"{}\">{}</a></li>", s.landing_path(), s.slug());
    }
    document(
        "Fixtures",
        None,
        "",
        &format!("<main><h1>Fixture scenarios</h1><ul>{links}</ul></main>"),
    )
}
