// Every clickable element of the top document, in document order.
function cdKind(el) {
  var tag = el.tagName;
  if (tag === 'BUTTON') return 'button';
  if (tag === 'A') return 'link';
  if (el.hasAttribute('onclick')) return 'onclick';
  if (getComputedStyle(el).cursor === 'pointer') return 'pointer';
  return null;
}

var out = [];
if (!document.body) return out;
var all = document.querySelectorAll('body, body *');
for (var i = 0; i < all.length; i++) {
  var el = all[i];
  var kind = cdKind(el);
  if (!kind) continue;
  var selector = cdMintSelector(el);
  if (selector === null) continue;
  out.push({ selector: selector, kind: kind, visible: cdVisible(el) });
}
return out;
