// Shared helpers prepended to the scripts that mint or resolve selectors.
// Every script body runs as a WebDriver "execute/sync" function body.

function cdEscape(s) {
  if (window.CSS && CSS.escape) return CSS.escape(s);
  return String(s).replace(/([^\w-])/g, '\\$1');
}

function cdMatchesOnly(sel, el) {
  var found;
  try {
    found = document.querySelectorAll(sel);
  } catch (e) {
    return false;
  }
  return found.length === 1 && found[0] === el;
}

function cdNthChild(el) {
  var i = 1;
  for (var s = el.previousElementSibling; s; s = s.previousElementSibling) i++;
  return el.tagName.toLowerCase() + ':nth-child(' + i + ')';
}

// Candidate fragments for one element, shortest and most stable first.
function cdCandidates(el) {
  var tag = el.tagName.toLowerCase();
  var out = [];
  if (el.id) out.push('#' + cdEscape(el.id));
  var classes = [];
  for (var i = 0; i < el.classList.length; i++) {
    if (el.classList[i]) classes.push('.' + cdEscape(el.classList[i]));
  }
  for (var j = 0; j < classes.length; j++) out.push(classes[j]);
  out.push(tag);
  for (var k = 0; k < classes.length; k++) out.push(tag + classes[k]);
  if (el !== document.documentElement) out.push(cdNthChild(el));
  return out;
}

// Shortest selector found by climbing from `el` towards the root. Each level
// combines its candidates with the shortest non-unique selectors of the level
// below through the child combinator; the all-nth-child path is the fallback.
// Returns null for detached elements.
function cdMintSelector(el) {
  if (!el || el.nodeType !== 1 || !document.documentElement.contains(el)) return null;
  var suffixes = [''];
  var exact = '';
  for (var cur = el; cur && cur.nodeType === 1; cur = cur.parentElement) {
    var cands = cdCandidates(cur);
    var combos = [];
    for (var i = 0; i < cands.length; i++) {
      for (var j = 0; j < suffixes.length; j++) {
        combos.push(suffixes[j] ? cands[i] + ' > ' + suffixes[j] : cands[i]);
      }
    }
    combos.sort(function (a, b) { return a.length - b.length; });
    for (var k = 0; k < combos.length; k++) {
      if (cdMatchesOnly(combos[k], el)) return combos[k];
    }
    var fixed = cur === document.documentElement ? 'html' : cdNthChild(cur);
    exact = exact ? fixed + ' > ' + exact : fixed;
    suffixes = combos.slice(0, 8);
  }
  return cdMatchesOnly(exact, el) ? exact : null;
}

function cdVisible(el) {
  if (!el.getClientRects().length) return false;
  var style = getComputedStyle(el);
  return style.visibility !== 'hidden' && style.display !== 'none';
}
